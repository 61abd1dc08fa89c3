#include "hjkit/problem.hpp"
#include "report.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>

namespace hjkit::cli {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string format = "text";
  double tolerance = 1e-9;
  int samples = 16;
  std::uint64_t seed = 20240611;
  std::string params;
  int order_cap = -1;
  int threads = 1;
  bool exact_only = false;

  std::string file;
  std::string equation, connection, lagrangian, momenta, lie_field, solution;
  int order = -1;
  bool compose = false;
  bool latex = false;

  std::string at, init, grid, path, csv, domain;
  std::string derivatives = "difference";
  int points = 200;
  double max_error = 1e-8;
  double max_residual = 1e-6;
  bool assume_flat = false;
};

struct Context {
  const Options& o;
  ProblemFile p;
  ZeroTestPolicy policy;
  PointValues params;  // numeric parameter values

  const Bundle& b() const { return *p.bundle; }
};

// "k=v,k=v" pairs; commas inside parentheses do not split.
std::vector<std::pair<std::string, std::string>> assignments(const std::string& text, const char* flag) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string cur;
  int depth = 0;
  auto flush = [&] {
    if (cur.empty()) return;
    auto eq = cur.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError(std::string(flag) + ": expected name=value, got '" + cur + "'");
    out.emplace_back(cur.substr(0, eq), cur.substr(eq + 1));
    cur.clear();
  };
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      flush();
    } else if (c != ' ') {
      cur += c;
    }
  }
  flush();
  return out;
}

std::vector<double> split_numbers(const std::string& text, char sep, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": bad number '" + part + "'");
    }
  }
  return out;
}

int base_index_of(const Bundle& b, const std::string& name, const char* flag) {
  auto i = b.base_index(name);
  if (!i) throw UsageError(std::string(flag) + ": '" + name + "' is not a base variable");
  return *i;
}

Context load(const Options& o) {
  Context ctx{o, load_problem(o.file, o.order_cap), {}, {}};
  ctx.policy.mode = o.exact_only ? ZeroTestPolicy::Mode::ExactOnly : ZeroTestPolicy::Mode::ExactThenProbabilistic;
  ctx.policy.tolerance = o.tolerance;
  ctx.policy.samples = o.samples;
  ctx.policy.seed = o.seed;
  std::map<std::string, Rational> bound;
  for (const auto& [name, value] : assignments(o.params, "--params")) {
    Expression v = ctx.p.bundle->parse(value);
    if (!v.is_constant()) throw UsageError("--params: value of " + name + " must be a number");
    bound[name] = v.constant_value();
  }
  if (!bound.empty()) ctx.p = bind_parameters(ctx.p, bound);
  auto all = ctx.p.parameter_values();
  for (const auto& [k, v] : bound) all[k] = v;
  for (const auto& [k, v] : all) ctx.params[ctx.p.bundle->param(k)] = v.get_d();
  return ctx;
}

LabeledExpressions rules_of(const SolvedPde& s) {
  LabeledExpressions out;
  for (const Rule& r : s.rules()) out.emplace_back(s.bundle().jet_name(r.alpha, r.K), r.rhs);
  return out;
}

LabeledExpressions coefficients_of(const HolonomicConnection& c) {
  LabeledExpressions out;
  for (const auto& [key, v] : c.coefficients()) out.emplace_back(c.bundle().jet_name(key.first, key.second), v);
  return out;
}

const ConnectionBlock& connection_block(const Context& ctx) {
  const ConnectionBlock& cb = ctx.p.connection(ctx.o.connection);
  return cb;
}

// ---- commands -----------------------------------------------------------

void cmd_prolong(Context& ctx, Report& rep) {
  const auto& eb = ctx.p.equation(ctx.o.equation);
  int r = ctx.o.order < 0 ? 1 : ctx.o.order;
  auto s = prolong_system(ctx.p.solved(eb), r);
  rep.meta("equation", eb.name);
  rep.meta("prolongation", r);
  rep.meta("order", s.order());
  rep.section("rules", rules_of(s));
}

void cmd_flatness(Context& ctx, Report& rep) {
  const auto& cb = connection_block(ctx);
  auto c = ctx.p.make_connection(cb);
  rep.meta("connection", cb.name);
  rep.meta("order", cb.order);
  LabeledExpressions out;
  for (const auto& r : curvature(c)) out.emplace_back(r.label, r.value);
  rep.section("curvature", out);
}

void cmd_check_flat(Context& ctx, Report& rep) {
  const auto& cb = connection_block(ctx);
  rep.meta("connection", cb.name);
  rep.meta("order", cb.order);
  rep.group(is_flat(ctx.p.make_connection(cb), ctx.policy));
}

void cmd_hj_eq(Context& ctx, Report& rep, std::string& latex) {
  const auto& eb = ctx.p.equation(ctx.o.equation);
  int s = ctx.o.order < 0 ? 0 : ctx.o.order;
  std::optional<HolonomicConnection> ansatz;
  std::string name = "generic";
  const ConnectionBlock* cb = nullptr;
  if (!ctx.o.connection.empty()) {
    cb = &ctx.p.connection(ctx.o.connection);
  } else {
    for (const auto& c : ctx.p.connections)
      if (c.name == "ansatz" && c.order == s) cb = &c;
  }
  if (cb) {
    ansatz = ctx.p.make_connection(*cb);
    name = cb->name;
  }
  auto sys = generate_hj_system(ctx.p.solved(eb), s, ansatz);
  rep.meta("equation", eb.name);
  rep.meta("order", s);
  rep.meta("ansatz", name);
  rep.section("ansatz", coefficients_of(sys.connection));
  rep.section("hj-equations", sys.equations);
  LabeledExpressions shown = sys.equations;
  if (ctx.o.compose) {
    shown = compose_with_flatness(sys);
    rep.section("composed", shown);
  }
  if (ctx.o.latex) {
    latex = hj_report_latex(eb.name + (ctx.o.compose ? ", HJ system closed by flatness" : ", HJ system"), shown);
    rep.meta("latex", latex);
  }
}

void hj_check(Context& ctx, Report& rep, bool subdiffiety) {
  const auto& cb = connection_block(ctx);
  auto c = ctx.p.make_connection(cb);
  std::optional<SolvedPde> s;
  if (subdiffiety && !ctx.o.lagrangian.empty()) {
    const auto& lb = ctx.p.lagrangian(ctx.o.lagrangian);
    s = euler_lagrange_system(ctx.p.make_lagrangian(lb), lb.solve_for);
    rep.meta("lagrangian", lb.name);
    rep.section("euler-lagrange-system", rules_of(*s));
  } else {
    const auto& eb = ctx.p.equation(ctx.o.equation);
    s = ctx.p.solved(eb);
    rep.meta("equation", eb.name);
  }
  rep.meta("connection", cb.name);
  auto r = check_hj_solution(*s, c, ctx.policy);
  rep.meta("flatness", r.flatness.passed() ? "checked" : "attested (diagnostic only: connection not flat)");
  if (subdiffiety) {
    int leaf_space = static_cast<int>(ctx.b().jet_coordinates(cb.order).size());
    rep.meta("leaf_dimension", ctx.b().n());
    rep.meta("leaf_space_dimension", leaf_space);
    rep.meta("dimension", ctx.b().n() + leaf_space);
  }
  rep.group(r.flatness);
  rep.group(r.containment);
}

const LagrangianBlock& lagrangian_block(Context& ctx, Report& rep) {
  const auto& lb = ctx.p.lagrangian(ctx.o.lagrangian);
  rep.meta("lagrangian", lb.name);
  rep.meta("order", ctx.p.make_lagrangian(lb).top_order());
  return lb;
}

void cmd_el(Context& ctx, Report& rep) {
  auto lg = ctx.p.make_lagrangian(lagrangian_block(ctx, rep));
  auto el = euler_lagrange(lg);
  LabeledExpressions out;
  for (int a = 0; a < ctx.b().m(); ++a)
    out.emplace_back("delta L/delta " + ctx.b().dependent_names()[static_cast<std::size_t>(a)],
                     el[static_cast<std::size_t>(a)]);
  rep.section("euler-lagrange", out);
}

LabeledExpressions momenta_entries(const Bundle& b, const MomentumSection& t) {
  LabeledExpressions out;
  for (const auto& [key, v] : t) out.emplace_back(momentum_label(b, key), v);
  return out;
}

void cmd_legendre(Context& ctx, Report& rep) {
  auto lg = ctx.p.make_lagrangian(lagrangian_block(ctx, rep));
  auto t = legendre_local(lg);
  rep.section("legendre", momenta_entries(ctx.b(), t));
  rep.group(run_checks("first-variation", first_variation_defect(lg, t), ctx.policy));
}

void cmd_constraints(Context& ctx, Report& rep) {
  auto lg = ctx.p.make_lagrangian(lagrangian_block(ctx, rep));
  LabeledExpressions out;
  for (auto& [label, e] : constraint_equations(lg)) out.emplace_back("P[" + label + "]", e);
  rep.section("constraints", out);
}

void cmd_hamiltonian(Context& ctx, Report& rep) {
  auto lg = ctx.p.make_lagrangian(lagrangian_block(ctx, rep));
  MomentumSection t;
  if (!ctx.o.momenta.empty()) {
    const auto& mb = ctx.p.momenta_block(ctx.o.momenta);
    t = mb.values;
    rep.meta("momenta", mb.name);
  } else {
    t = legendre_local(lg);
    rep.meta("momenta", "legendre");
  }
  rep.section("hamiltonian", {{"E", hamiltonian_density(lg)}});
  rep.section("reduced", {{"H", reduce_hamiltonian(lg, t)}});
}

void cmd_elh(Context& ctx, Report& rep) {
  auto sys = elh_system(ctx.p.make_lagrangian(lagrangian_block(ctx, rep)));
  auto put = [&](const char* name, const std::vector<ElhEquation>& eqs) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : eqs) out.emplace_back(e.lhs, e.rhs.str());
    rep.section_text(name, out);
  };
  put("constraints", sys.constraints);
  put("dynamics", sys.dynamics);
  put("kinematics", sys.kinematics);
}

void cmd_check_hj_problem(Context& ctx, Report& rep) {
  const auto& lb = lagrangian_block(ctx, rep);
  const auto& cb = connection_block(ctx);
  rep.meta("connection", cb.name);
  MomentumSection t;
  if (!ctx.o.momenta.empty()) {
    const auto& mb = ctx.p.momenta_block(ctx.o.momenta);
    t = mb.values;
    rep.meta("momenta", mb.name);
  } else {
    rep.meta("momenta", "legendre");
  }
  auto r = check_generalized_hj(ctx.p.make_lagrangian(lb), ctx.p.make_connection(cb), t, ctx.policy, lb.solve_for);
  rep.group(r.flatness);
  rep.group(r.constraints);
  rep.group(r.field_equations);
  if (r.el_cross_check) {
    CheckGroup f = r.el_cross_check->flatness, c = r.el_cross_check->containment;
    f.name = "el-" + f.name;
    c.name = "el-" + c.name;
    rep.group(f);
    rep.group(c);
  }
}

std::optional<SampledSection> integrate(Context& ctx, Report& rep, const HolonomicConnection& c) {
  const Options& o = ctx.o;
  const Bundle& b = ctx.b();
  if (o.at.empty() || o.init.empty() || o.grid.empty())
    throw UsageError("integration needs --at, --init and --grid");
  std::vector<double> point(static_cast<std::size_t>(b.n()), 0.0);
  std::vector<bool> seen(point.size(), false);
  for (const auto& [name, v] : assignments(o.at, "--at")) {
    int i = base_index_of(b, name, "--at");
    point[static_cast<std::size_t>(i)] = split_numbers(v, ':', "--at").at(0);
    seen[static_cast<std::size_t>(i)] = true;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) throw UsageError("--at: missing " + b.base_names()[i]);

  GridSpec grid{point, point, std::vector<double>(point.size(), 1.0), {}};
  std::fill(seen.begin(), seen.end(), false);
  for (const auto& [name, v] : assignments(o.grid, "--grid")) {
    int i = base_index_of(b, name, "--grid");
    auto r = split_numbers(v, ':', "--grid");
    if (r.size() != 3) throw UsageError("--grid: expected name=lo:hi:h");
    grid.lo[static_cast<std::size_t>(i)] = r[0];
    grid.hi[static_cast<std::size_t>(i)] = r[1];
    grid.h[static_cast<std::size_t>(i)] = r[2];
    seen[static_cast<std::size_t>(i)] = true;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) throw UsageError("--grid: missing " + b.base_names()[i]);
  if (o.path.empty()) {
    for (int i = 0; i < b.n(); ++i) grid.path.push_back(i);
  } else {
    std::stringstream ss(o.path);
    std::string name;
    while (std::getline(ss, name, ',')) grid.path.push_back(base_index_of(b, name, "--path"));
  }

  PointValues initial;
  for (const auto& [name, v] : assignments(o.init, "--init")) {
    auto s = b.symbol(name);
    if (!s || !s->as_atom() || !b.is_jet(*s->as_atom())) throw UsageError("--init: '" + name + "' is not a jet variable");
    initial[*s->as_atom()] = eval_point(b.parse(v), ctx.params);
  }

  auto flat = is_flat(c, ctx.policy);
  rep.group(flat);
  std::optional<FlatnessWitness> witness;
  if (flat.passed()) {
    witness = FlatnessWitness::from_check(flat);
  } else if (o.assume_flat) {
    witness = FlatnessWitness::attest("--assume-flat");
  } else {
    return std::nullopt;
  }
  rep.meta("flatness", to_string(witness->source()));
  auto s = integrate_section(c, point, initial, grid, *witness, ctx.params);
  rep.numeric("nodes", s.grid.node_count());
  rep.numeric("coordinates", s.coords.size());
  rep.threshold("defect", s.defect, 100 * o.max_error);
  if (!o.csv.empty()) {
    std::ofstream out(o.csv);
    if (!out) throw UsageError("--csv: cannot write " + o.csv);
    s.write_csv(out);
  }
  return s;
}

void cmd_integrate(Context& ctx, Report& rep) {
  const auto& cb = connection_block(ctx);
  rep.meta("connection", cb.name);
  auto c = ctx.p.make_connection(cb);
  auto s = integrate(ctx, rep, c);
  if (!s || ctx.o.solution.empty()) return;
  const auto& sb = ctx.p.solution(ctx.o.solution);
  rep.meta("solution", sb.name);
  rep.threshold("max-error", max_error(*s, ctx.b(), sb.u, ctx.params), ctx.o.max_error);
}

void put_residual(Report& rep, const ResidualReport& r, double limit) {
  rep.numeric("points", r.points);
  rep.numeric("argmax", r.argmax);
  ordered_json per = ordered_json::object();
  for (const auto& [rule, v] : r.per_rule) per[rule] = v;
  rep.numeric("per_rule", per);
  rep.threshold("max-residual", r.max_abs, limit);
}

void cmd_residual(Context& ctx, Report& rep) {
  const Options& o = ctx.o;
  const Bundle& b = ctx.b();
  const auto& eb = ctx.p.equation(o.equation);
  auto s = ctx.p.solved(eb);
  rep.meta("equation", eb.name);
  if (o.solution.empty() == o.connection.empty())
    throw UsageError("residual needs exactly one of --solution or --connection");
  if (!o.solution.empty()) {
    const auto& sb = ctx.p.solution(o.solution);
    rep.meta("solution", sb.name);
    std::vector<std::vector<double>> pts;
    if (!o.at.empty()) {
      std::vector<double> pt(static_cast<std::size_t>(b.n()), 0.0);
      for (const auto& [name, v] : assignments(o.at, "--at"))
        pt[static_cast<std::size_t>(base_index_of(b, name, "--at"))] = split_numbers(v, ':', "--at").at(0);
      pts.push_back(pt);
    } else {
      std::vector<double> lo(static_cast<std::size_t>(b.n()), 0.5), hi(lo.size(), 1.5);
      for (const auto& [name, v] : assignments(o.domain, "--domain")) {
        auto i = static_cast<std::size_t>(base_index_of(b, name, "--domain"));
        auto r = split_numbers(v, ':', "--domain");
        if (r.size() != 2 || !(r[0] < r[1])) throw UsageError("--domain: expected name=lo:hi with lo < hi");
        lo[i] = r[0];
        hi[i] = r[1];
      }
      std::mt19937_64 rng(o.seed);
      for (int k = 0; k < o.points; ++k) {
        std::vector<double> pt(lo.size());
        for (std::size_t i = 0; i < lo.size(); ++i) pt[i] = std::uniform_real_distribution<double>(lo[i], hi[i])(rng);
        pts.push_back(pt);
      }
    }
    put_residual(rep, residual(s, sb.u, pts, ctx.params), o.max_residual);
    return;
  }
  const auto& cb = connection_block(ctx);
  rep.meta("connection", cb.name);
  rep.meta("derivatives", o.derivatives);
  auto c = ctx.p.make_connection(cb);
  auto section = integrate(ctx, rep, c);
  if (!section) return;
  auto source = o.derivatives == "lift" ? DerivativeSource::Lift : DerivativeSource::Difference;
  put_residual(rep, residual(s, *section, source, &c, ctx.params), o.max_residual);
}

void cmd_symmetry(Context& ctx, Report& rep) {
  const auto& eb = ctx.p.equation(ctx.o.equation);
  const auto& lb = ctx.p.lie_field(ctx.o.lie_field);
  auto s = ctx.p.solved(eb);
  int r = ctx.o.order < 0 ? s.order() : ctx.o.order;
  rep.meta("equation", eb.name);
  rep.meta("lie_field", lb.name);
  rep.meta("prolongation", r);
  auto y = prolong_lie_field(ctx.b(), lb.field, r);
  LabeledExpressions out;
  for (int i = 0; i < ctx.b().n(); ++i)
    out.emplace_back("X[" + ctx.b().base_names()[static_cast<std::size_t>(i)] + "]", y.base[static_cast<std::size_t>(i)]);
  for (const auto& [key, v] : y.vertical) out.emplace_back("Y[" + ctx.b().jet_name(key.first, key.second) + "]", v);
  rep.section("prolonged-field", out);
  rep.group(is_lie_symmetry(lb.field, s, ctx.policy));
}

// ---- driver ---------------------------------------------------------------

struct Command {
  const char* name;
  const char* help;
  std::function<void(Context&, Report&)> run;
  std::vector<const char*> options;
};

int run(int argc, char** argv) {
  Options o;
  std::string latex;
  CLI::App app{"hjkit: jet-space toolkit for generalized Hamilton-Jacobi equations"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--format", o.format, "Report format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--tolerance", o.tolerance, "Relative tolerance of the probabilistic zero test");
  app.add_option("--samples", o.samples, "Sample points of the probabilistic zero test")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--params", o.params, "Parameter values k=v[,k=v...], substituted before any check");
  app.add_option("--order-cap", o.order_cap, "Highest jet order the engine may create")->check(CLI::PositiveNumber);
  app.add_option("--threads", o.threads, "Worker threads for independent checks")->check(CLI::PositiveNumber);
  app.add_flag("--exact-only", o.exact_only, "Disable the probabilistic zero test");

  std::vector<Command> commands = {
      {"prolong", "Prolong an equation by r total derivatives", cmd_prolong, {"equation", "order"}},
      {"flatness", "Print the curvature of a connection", cmd_flatness, {"connection"}},
      {"check-flat", "Zero-test the curvature of a connection", cmd_check_flat, {"connection"}},
      {"hj-eq", "Generate the HJ system of an equation", [&](Context& c, Report& r) { cmd_hj_eq(c, r, latex); },
       {"equation", "connection", "order", "compose", "latex"}},
      {"check-hj", "Check that a flat connection defines an HJ subdiffiety",
       [](Context& c, Report& r) { hj_check(c, r, false); }, {"equation", "connection"}},
      {"check-subdiffiety", "HJ check plus dimension report", [](Context& c, Report& r) { hj_check(c, r, true); },
       {"equation", "connection", "lagrangian"}},
      {"el", "Euler-Lagrange expressions", cmd_el, {"lagrangian"}},
      {"legendre", "Local Legendre form and its first-variation check", cmd_legendre, {"lagrangian"}},
      {"constraints", "First constraint equations", cmd_constraints, {"lagrangian"}},
      {"hamiltonian", "Hamiltonian density and its reduction", cmd_hamiltonian, {"lagrangian", "momenta"}},
      {"elh", "Euler-Lagrange-Hamilton system", cmd_elh, {"lagrangian"}},
      {"check-hj-problem", "Check the generalized HJ problem", cmd_check_hj_problem,
       {"lagrangian", "connection", "momenta"}},
      {"integrate", "Integrate a nabla-constant section", cmd_integrate,
       {"connection", "integration", "solution", "max-error"}},
      {"residual", "Residual of an equation on a closed form or an integrated section", cmd_residual,
       {"equation", "connection", "integration", "solution", "residual"}},
      {"symmetry-check", "Check a Lie point symmetry", cmd_symmetry, {"equation", "lie-field", "order"}},
  };

  const Command* selected = nullptr;
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("file", o.file, "Problem file")->required();
    for (std::string opt : cmd.options) {
      if (opt == "equation") sub->add_option("--equation", o.equation, "Equation block (default: first)");
      if (opt == "connection") sub->add_option("--connection", o.connection, "Connection block (default: first)");
      if (opt == "lagrangian") sub->add_option("--lagrangian", o.lagrangian, "Lagrangian block");
      if (opt == "momenta") sub->add_option("--momenta", o.momenta, "Momenta block (default: Legendre form)");
      if (opt == "lie-field") sub->add_option("--lie-field", o.lie_field, "Lie field block (default: first)");
      if (opt == "solution") sub->add_option("--solution", o.solution, "Closed-form solution block");
      if (opt == "order") sub->add_option("--order", o.order, "Order (connection order or prolongation)");
      if (opt == "compose") sub->add_flag("--compose-flatness", o.compose, "Close the system with flatness");
      if (opt == "latex") sub->add_flag("--latex", o.latex, "Emit LaTeX");
      if (opt == "max-error") sub->add_option("--max-error", o.max_error, "Integration tolerance");
      if (opt == "integration") {
        sub->add_option("--at", o.at, "Initial base point, e.g. t=0,x=0");
        sub->add_option("--init", o.init, "Initial jet values, e.g. u=-1");
        sub->add_option("--grid", o.grid, "Grid, e.g. t=0:0.5:0.01,x=0:0.5:0.01");
        sub->add_option("--path", o.path, "Integration path order, e.g. t,x");
        sub->add_option("--csv", o.csv, "Write the sampled section as CSV");
        sub->add_flag("--assume-flat", o.assume_flat, "Integrate even if the flatness check fails");
      }
      if (opt == "residual") {
        sub->add_option("--points", o.points, "Random sample points for closed forms")->check(CLI::PositiveNumber);
        sub->add_option("--domain", o.domain, "Sampling box, e.g. t=0:1,x=-5:5 (default [0.5, 1.5] per axis)");
        sub->add_option("--derivatives", o.derivatives, "Jet source for sections")
            ->check(CLI::IsMember({"lift", "difference"}));
        sub->add_option("--max-residual", o.max_residual, "Residual tolerance");
        sub->add_option("--max-error", o.max_error, "Integration tolerance");
      }
    }
    sub->callback([&selected, &cmd] { selected = &cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  set_thread_count(o.threads);
  Report rep(selected->name, std::filesystem::path(o.file).filename().string());
  int code = 0;
  try {
    Context ctx = load(o);
    selected->run(ctx, rep);
    code = rep.exit_code();
  } catch (const ProblemError& e) {
    rep.error("parse", e.message(), e.where().line, e.where().column);
    code = 2;
  } catch (const NumericError& e) {
    rep.error("numeric", e.what());
    code = 1;
  } catch (const std::exception& e) {
    rep.error("usage", e.what());
    code = 2;
  }
  if (o.format == "json") {
    std::cout << rep.json().dump(2) << "\n";
  } else if (o.latex && code == 0) {
    std::cout << latex;
  } else {
    std::cout << rep.text();
  }
  return code;
}

}  // namespace
}  // namespace hjkit::cli

int main(int argc, char** argv) { return hjkit::cli::run(argc, argv); }
