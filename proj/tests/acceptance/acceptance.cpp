// End-to-end acceptance: drives the hjkit CLI on the shipped fixtures and
// prints one PASS/FAIL line per criterion. Exit status is the number of
// failed criteria (0 when all pass).
#include "hjkit/problem.hpp"

#include <json.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace hjkit;

namespace {

struct Run {
  int exit = -1;
  std::string out;
  json report;
  double seconds = 0;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

Run shell(const std::vector<std::string>& argv) {
  std::string cmd;
  for (const auto& a : argv) cmd += quote(a) + " ";
  cmd += "2>/dev/null";
  Run r;
  auto t0 = std::chrono::steady_clock::now();
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.exit = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

Run hjkit_json(const std::string& cmd, const std::string& fixture, std::vector<std::string> args) {
  std::vector<std::string> argv = {HJKIT_CLI, cmd, std::string(HJKIT_FIXTURES) + "/" + fixture};
  argv.insert(argv.end(), args.begin(), args.end());
  argv.insert(argv.end(), {"--format", "json"});
  Run r = shell(argv);
  r.report = json::parse(r.out, nullptr, false);
  return r;
}

/// Collects failed sub-conditions for one criterion.
class Criterion {
 public:
  explicit Criterion(std::string title) : title_(std::move(title)) {}

  bool expect(bool ok, const std::string& what) {
    if (!ok) failed_.push_back(what);
    return ok;
  }
  void note(const std::string& s) { notes_.push_back(s); }

  bool finish(int index) const {
    bool ok = failed_.empty();
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << index << ": " << title_;
    std::string sep = " [";
    for (const auto& n : notes_) std::cout << sep << n, sep = "; ";
    if (!notes_.empty()) std::cout << "]";
    std::cout << "\n";
    for (const auto& f : failed_) std::cout << "    failed: " << f << "\n";
    return ok;
  }

 private:
  std::string title_;
  std::vector<std::string> failed_, notes_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

const json* section(const json& r, const std::string& name) {
  if (!r.contains("sections")) return nullptr;
  for (const auto& s : r["sections"])
    if (s["name"] == name) return &s["entries"];
  return nullptr;
}

std::optional<std::string> entry(const json& r, const std::string& sec, const std::string& label) {
  const json* es = section(r, sec);
  if (!es) return std::nullopt;
  for (const auto& e : *es)
    if (e["label"] == label) return e["expr"].get<std::string>();
  return std::nullopt;
}

std::optional<double> threshold(const json& r, const std::string& name) {
  if (!r.contains("thresholds")) return std::nullopt;
  for (const auto& t : r["thresholds"])
    if (t["name"] == name) return t["value"].get<double>();
  return std::nullopt;
}

bool all_verdicts(const json& r, const std::string& status) {
  if (!r.contains("checks")) return false;
  for (const auto& g : r["checks"])
    for (const auto& c : g["checks"])
      if (c["verdict"]["status"] != status) return false;
  return true;
}

double max_magnitude(const json& r) {
  double m = 0;
  for (const auto& g : r["checks"])
    for (const auto& c : g["checks"]) m = std::max(m, c["verdict"]["max_magnitude"].get<double>());
  return m;
}

/// First nonzero verdict carrying a witness, rendered for the log.
std::optional<std::string> witness(const json& r) {
  if (!r.contains("checks")) return std::nullopt;
  for (const auto& g : r["checks"])
    for (const auto& c : g["checks"]) {
      const auto& v = c["verdict"];
      if (v["status"] != "nonzero" || !v.contains("witness")) continue;
      double value = v["witness_value"].get<double>();
      if (!std::isfinite(value) || value == 0) continue;
      return g["name"].get<std::string>() + "/" + c["label"].get<std::string>() + " = " + fmt(value);
    }
  return std::nullopt;
}

/// Canonical equality of a CLI-printed expression with a reference string.
bool same(const ProblemFile& p, const std::optional<std::string>& got, const std::string& want) {
  if (!got) return false;
  try {
    return p.bundle->parse(*got) == p.bundle->parse(want);
  } catch (const std::exception&) {
    return false;
  }
}

ProblemFile fixture(const std::string& name) { return load_problem(std::string(HJKIT_FIXTURES) + "/" + name); }

bool burgers() {
  Criterion c("Burgers pipeline");
  auto p = fixture("burgers.hjk");
  double total = 0;
  auto eq = hjkit_json("hj-eq", "burgers.hjk", {"--order", "0", "--compose-flatness"});
  total += eq.seconds;
  c.expect(same(p, entry(eq.report, "composed", "R[u;t,x]"), "B_t - B_xx - 2*B*B_ux - B^2*B_uu - u*B_x - B^2"),
           "composed HJ equation differs from B_t - B_xx - 2BB_ux - B^2B_uu - uB_x - B^2");
  // Derived 0th HJ equation: A = B_x + B*B_u + u*B.
  c.expect(same(p, entry(eq.report, "hj-equations", "u_t"), "A - (B_x + B*B_u + u*B)"),
           "0th HJ equation is not A = B_x + B*B_u + u*B");

  auto hj = hjkit_json("check-hj", "burgers.hjk", {"--connection", "nabla"});
  total += hj.seconds;
  c.expect(hj.exit == 0 && all_verdicts(hj.report, "zero-exact"), "check-hj B = u/(x-x0) is not zero-exact");

  const std::vector<std::string> section = {"--connection", "nabla", "--at", "t=0,x=0", "--init", "u=-1",
                                            "--grid", "t=0:0.5:0.01,x=0:0.5:0.01"};
  auto in = section;
  in.insert(in.end(), {"--solution", "leaf"});
  auto integ = hjkit_json("integrate", "burgers.hjk", in);
  total += integ.seconds;
  auto err = threshold(integ.report, "max-error"), defect = threshold(integ.report, "defect");
  c.expect(integ.exit == 0 && err && *err <= 1e-8, "integrated section deviates from -(x-1)/(t-t0) by > 1e-8");
  c.expect(defect && *defect <= 1e-10, "flatness defect of the integrated section > 1e-10");

  auto lift = section;
  lift.insert(lift.end(), {"--derivatives", "lift", "--max-residual", "1e-8"});
  auto res = hjkit_json("residual", "burgers.hjk", lift);
  total += res.seconds;
  auto lr = threshold(res.report, "max-residual");
  c.expect(res.exit == 0 && lr && *lr <= 1e-8, "residual of the integrated section > 1e-8");

  auto closed = hjkit_json("residual", "burgers.hjk",
                           {"--solution", "leaf", "--domain", "t=0:0.5,x=0:0.5", "--max-residual", "1e-8"});
  total += closed.seconds;
  auto cr = threshold(closed.report, "max-residual");
  c.expect(closed.exit == 0 && cr && *cr <= 1e-8, "closed-form leaf residual > 1e-8");
  c.expect(total < 5.0, "pipeline took " + fmt(total) + " s");
  if (err) c.note("max-error " + fmt(*err));
  if (defect) c.note("defect " + fmt(*defect));
  if (lr && cr) c.note("residual lift " + fmt(*lr) + ", closed form " + fmt(*cr));
  c.note("runtime " + fmt(total) + " s");
  return c.finish(1);
}

bool heat() {
  Criterion c("Heat pipeline");
  auto p = fixture("heat.hjk");
  auto eq = hjkit_json("hj-eq", "heat.hjk", {"--order", "0", "--compose-flatness"});
  c.expect(same(p, entry(eq.report, "hj-equations", "u_t"), "A - (B_x + B*B_u)"), "0th HJ equation is not A = B_x + BB_u");
  c.expect(same(p, entry(eq.report, "composed", "R[u;t,x]"), "B_t - B_xx - 2*B*B_ux - B^2*B_uu"),
           "composed form differs from B_t - B_xx - 2BB_ux - B^2B_uu");

  auto hj = hjkit_json("check-hj", "heat.hjk", {"--connection", "kernel"});
  bool kernel_b = same(p, std::optional<std::string>(p.connection("kernel").coefficients.at({0, {0, 1}}).str()),
                       "-x/(2*t)*u");
  c.expect(kernel_b, "kernel fixture does not carry B = -x/(2t) u");
  c.expect(hj.exit == 0 && all_verdicts(hj.report, "zero-exact"), "check-hj on B = -x/(2t) u is not zero-exact");

  auto integ = hjkit_json("integrate", "heat.hjk",
                          {"--connection", "kernel", "--at", "t=1,x=0", "--init", "u=1", "--grid",
                           "t=1:2:0.01,x=0:1:0.01", "--solution", "kernel", "--max-error", "1e-7"});
  auto err = threshold(integ.report, "max-error");
  c.expect(integ.exit == 0 && err && *err <= 1e-7, "integrated section deviates from the heat kernel by > 1e-7");

  auto printed = hjkit_json("residual", "heat.hjk", {"--solution", "printed", "--at", "t=1,x=1"});
  auto pr = threshold(printed.report, "max-residual");
  c.expect(pr && *pr > 1e-2, "printed closed form residual at (1, 1) is not > 1e-2");
  if (err) c.note("kernel max-error " + fmt(*err));
  if (pr) c.note("printed form residual " + fmt(*pr));
  return c.finish(2);
}

bool kdv() {
  Criterion c("KdV pipeline");
  auto p = fixture("kdv.hjk");
  auto hj = hjkit_json("check-hj", "kdv.hjk", {"--connection", "nabla", "--exact-only"});
  c.expect(hj.exit == 0 && all_verdicts(hj.report, "zero-exact"), "flatness/containment not zero-exact");
  c.expect(hj.seconds < 30, "exact check took " + fmt(hj.seconds) + " s");

  auto sym = hjkit_json("symmetry-check", "kdv.hjk", {"--lie-field", "boost"});
  const std::vector<std::pair<std::string, std::string>> y2 = {
      {"Y[u]", "1"},          {"Y[u_t]", "6*u_x"},  {"Y[u_x]", "0"},
      {"Y[u_xt]", "6*u_xx"}, {"Y[u_tt]", "12*u_xt"}, {"Y[u_xx]", "0"}};
  for (const auto& [label, want] : y2)
    c.expect(same(p, entry(sym.report, "prolonged-field", label), want), label + " != " + want);
  c.expect(sym.exit == 0 && all_verdicts(sym.report, "zero-exact"), "boost is not an exact Lie symmetry");

  // Library cross-check of the same prolongation at r = 3.
  auto y = prolong_lie_field(*p.bundle, p.lie_field("boost").field, 3);
  c.expect(y.vertical.at({0, {1, 1}}) == p.bundle->parse("6*u_xx") && y.vertical.at({0, {0, 2}}) == p.bundle->parse("12*u_xt"),
           "library prolongation disagrees with the CLI");
  c.note("exact check " + fmt(hj.seconds) + " s");
  return c.finish(3);
}

bool boussinesq() {
  Criterion c("Boussinesq pipeline");
  auto p = fixture("boussinesq.hjk");
  auto el = hjkit_json("el", "boussinesq.hjk", {});
  c.expect(same(p, entry(el.report, "euler-lagrange", "delta L/delta u"), "-v_t + u + u^2 - u_xx") &&
               same(p, entry(el.report, "euler-lagrange", "delta L/delta v"), "u_t - v_xx"),
           "Euler-Lagrange expressions differ");

  auto ham = hjkit_json("hamiltonian", "boussinesq.hjk", {});
  const std::string H = "1/2*(u_x^2 + v_x^2) - u^3/3 - u^2/2";
  c.expect(same(p, entry(ham.report, "reduced", "H"), H), "reduced Hamiltonian differs from H");

  auto wave = hjkit_json("check-hj-problem", "boussinesq.hjk", {"--connection", "wave"});
  c.expect(wave.exit == 0 && all_verdicts(wave.report, "zero-exact"), "derived traveling wave fails check-hj-problem");
  auto printed = hjkit_json("check-hj-problem", "boussinesq.hjk", {"--connection", "printed"});
  c.expect(printed.exit == 1, "printed A^2 does not fail check-hj-problem");

  auto sech = hjkit_json("residual", "boussinesq.hjk", {"--solution", "sech2", "--domain", "t=0:2,x=-5:5"});
  auto sr = threshold(sech.report, "max-residual");
  c.expect(sech.exit == 0 && sr && *sr <= 1e-6 && sech.report["numeric"]["points"] == 200,
           "corrected sech^2 residual > 1e-6 at 200 points");

  // Discrepancy evidence.
  const Bundle& b = *p.bundle;
  Lagrangian lg = p.make_lagrangian(p.lagrangian());
  auto e = euler_lagrange(lg);
  Expression d1 = e[0] - b.parse("u + u^2 + u_xx - v_t");  // printed +u_xx
  c.expect(d1 == b.parse("-2*u_xx"), "(i) printed +u_xx not contradicted");

  auto with_t = [&](const std::string& pt, const std::string& qt) {
    MomentumSection m = legendre_local(lg);
    m[{0, {0, 0}, 0}] = b.parse(pt);
    m[{1, {0, 0}, 0}] = b.parse(qt);
    return reduce_hamiltonian(lg, m) - b.parse(H);
  };
  Expression printed_signs = with_t("-v/2", "u/2"), derived_signs = with_t("v/2", "-u/2");
  c.expect(!printed_signs.is_zero() && derived_signs.is_zero(), "(ii) momentum sign evidence missing");

  Expression h0 = b.parse("1/2*(u_x^2 + v_x^2) - u^3/6 - u^2/2");
  Expression d3 = reduce_hamiltonian(lg, legendre_local(lg)) - h0;
  c.expect(d3 == b.parse("-u^3/6"), "(iii) printed -u^3/6 not contradicted");

  auto pw = hjkit_json("residual", "boussinesq.hjk", {"--solution", "printed", "--domain", "t=0:2,x=-5:5"});
  auto pwr = threshold(pw.report, "max-residual");
  c.expect(pw.exit == 1 && pwr && *pwr > 1e-6, "(iv) printed width does not fail the residual oracle");

  if (sr) c.note("sech2 residual " + fmt(*sr));
  c.note("(i) EL - printed = " + d1.str());
  c.note("(ii) H(printed P) - H = " + printed_signs.str());
  c.note("(iii) H - H0 = " + d3.str());
  if (pwr) c.note("(iv) printed width residual " + fmt(*pwr));
  return c.finish(4);
}

bool oscillator() {
  Criterion c("Oscillator");
  auto p = fixture("oscillator.hjk");
  auto eq = hjkit_json("hj-eq", "oscillator.hjk", {"--order", "0"});
  c.expect(same(p, entry(eq.report, "hj-equations", "x_tt"), "X_t + X*X_x + x"), "0th HJ equation differs from X_t + X X_x + x");
  auto hj = hjkit_json("check-hj", "oscillator.hjk", {"--connection", "nabla", "--samples", "16"});
  bool probabilistic = false;
  for (const auto& g : hj.report["checks"])
    for (const auto& v : g["checks"])
      if (v["verdict"]["status"] == "zero-probabilistic" && v["verdict"]["samples"] == 16) probabilistic = true;
  double m = hj.report.contains("checks") ? max_magnitude(hj.report) : 1;
  c.expect(hj.exit == 0 && probabilistic, "X = -x tan t is not zero-probabilistic over 16 points");
  c.expect(m <= 1e-10, "max sampled magnitude " + fmt(m) + " > 1e-10");
  c.note("max sampled magnitude " + fmt(m));
  return c.finish(5);
}

bool properties() {
  Criterion c("Property suites");
  fs::path out = fs::temp_directory_path() / ("hjkit_props_" + std::to_string(getpid()) + ".json");
  Run r = shell({HJKIT_UNIT, "--gtest_filter=Property.*", "--gtest_output=json:" + out.string()});
  std::ifstream in(out);
  json report = json::parse(in, nullptr, false);
  fs::remove(out);
  c.expect(r.exit == 0, "property binary exited " + std::to_string(r.exit));
  const std::vector<std::string> required = {
      "TotalDerivativesCommute",          "EulerLagrangeAnnihilatesDivergences", "LegendreFormHasNoFirstVariationDefect",
      "ProlongationComposes",             "PullbackIntertwinesTotalDerivative",  "IntegratorIsFourthOrder",
      "DiscreteGradientMatchesEulerLagrange", "CanonicalDifferenceIsZero",        "ProductRule"};
  std::map<std::string, const json*> tests;
  if (report.is_object())
    for (const auto& suite : report["testsuites"])
      for (const auto& t : suite["testsuite"]) tests[t["name"].get<std::string>()] = &t;
  for (const auto& name : required) {
    auto it = tests.find(name);
    if (!c.expect(it != tests.end(), name + " did not run")) continue;
    const json& t = *it->second;
    int cases = t.contains("cases") ? std::stoi(t["cases"].get<std::string>()) : 0;
    c.expect(!t.contains("failures"), name + " failed");
    c.expect(cases >= 50, name + " ran " + std::to_string(cases) + " cases");
    if (name == "IntegratorIsFourthOrder" && t.contains("ratio_range"))
      c.note("convergence ratios " + t["ratio_range"].get<std::string>());
  }
  c.note(std::to_string(required.size()) + " suites, >= 50 cases each");
  return c.finish(6);
}

bool negative_controls() {
  Criterion c("Negative controls");
  struct Mutant {
    std::string file, cmd;
    std::vector<std::string> args;
  };
  const std::vector<Mutant> mutants = {
      {"burgers.hjk", "check-hj", {"--connection", "mutant"}},
      {"heat.hjk", "check-hj", {"--connection", "mutant"}},
      {"kdv.hjk", "check-hj", {"--connection", "mutant"}},
      {"boussinesq.hjk", "check-hj-problem", {"--connection", "mutant"}},
      {"boussinesq.hjk", "check-hj-problem", {"--connection", "wave", "--momenta", "mutant"}},
      {"oscillator.hjk", "check-hj", {"--connection", "mutant"}},
      {"oscillator.hjk", "check-hj-problem", {"--connection", "nabla", "--momenta", "mutant"}},
  };
  int shown = 0;
  for (const auto& m : mutants) {
    auto r = hjkit_json(m.cmd, m.file, m.args);
    auto w = witness(r.report);
    std::string tag = m.file + " " + m.cmd + " " + m.args.back();
    c.expect(r.exit == 1 && r.report.value("status", "") == "fail", tag + " did not fail with exit 1");
    c.expect(w.has_value(), tag + " has no concrete witness");
    if (w && shown++ < 2) c.note(m.file + ": " + *w);
  }
  Run usage = shell({HJKIT_CLI, "check-hj", std::string(HJKIT_SOURCE) + "/tests/golden/bad/duplicate.hjk"});
  c.expect(usage.exit == 2, "parse error did not exit 2");
  Run golden = shell({"python3", std::string(HJKIT_SOURCE) + "/tests/golden/run_golden.py", "--hjkit", HJKIT_CLI,
                      "--fixtures", HJKIT_FIXTURES});
  c.expect(golden.exit == 0, "golden files differ");
  std::string last = golden.out.substr(golden.out.find_last_of('\n', golden.out.size() - 2) + 1);
  if (!last.empty() && last.back() == '\n') last.pop_back();
  c.note(std::to_string(mutants.size()) + " mutants fail with witnesses");
  c.note("goldens: " + last);
  return c.finish(7);
}

}  // namespace

int main() {
  int failed = 0;
  for (auto* run : {burgers, heat, kdv, boussinesq, oscillator, properties, negative_controls}) {
    try {
      failed += run() ? 0 : 1;
    } catch (const std::exception& e) {
      std::cout << "FAIL (exception: " << e.what() << ")\n";
      ++failed;
    }
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria pass")) << "\n";
  return failed;
}
