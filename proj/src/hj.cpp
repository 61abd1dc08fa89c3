#include "hjkit/hj.hpp"

#include <sstream>

namespace hjkit {

HolonomicConnection generic_ansatz(BundlePtr bundle, int s) {
  const Bundle& b = *bundle;
  std::vector<Atom> params;
  for (int i = 0; i < b.n(); ++i) params.push_back(b.base(i));
  for (Atom a : b.jet_coordinates(s)) params.push_back(a);
  CoefficientMap coeffs;
  for (int alpha = 0; alpha < b.m(); ++alpha)
    for (const auto& M : multi_indices_of_order(b.n(), s + 1)) {
      UnknownFunction f{"N" + b.dependent_names()[static_cast<std::size_t>(alpha)] + b.suffix(M), params};
      coeffs[{alpha, M}] = apply_unknown(f);
    }
  return HolonomicConnection(std::move(bundle), s, std::move(coeffs));
}

HjSystem generate_hj_system(const SolvedPde& s, int order, const std::optional<HolonomicConnection>& ansatz) {
  if (order < 0 || order >= s.order())
    throw std::invalid_argument("connection order " + std::to_string(order) + " out of range [0, " +
                                std::to_string(s.order() - 1) + "]");
  HjSystem sys{ansatz ? *ansatz : generic_ansatz(s.bundle_ptr(), order), {}, {}};
  if (sys.connection.order() != order) throw std::invalid_argument("ansatz order does not match requested order");
  const Bundle& b = s.bundle();
  // The coefficients stay formal, so order independence is assumed here.
  auto flat = FlatnessWitness::attest("formal generation");
  for (const Rule& r : s.rules()) {
    sys.equations.emplace_back(b.jet_name(r.alpha, r.K),
                               sys.connection.lifted(r.alpha, r.K) - pullback_prolongation(sys.connection, r.rhs, flat));
    sys.leads.emplace_back(r.alpha, r.K);
  }
  return sys;
}

LabeledExpressions compose_with_flatness(const HjSystem& sys) {
  const HolonomicConnection& c = sys.connection;
  std::vector<std::pair<UnknownFunction, Expression>> solved;
  for (std::size_t k = 0; k < sys.equations.size(); ++k) {
    const std::string& label = sys.equations[k].first;
    const auto& [alpha, K] = sys.leads[k];
    if (order(K) != c.order() + 1) continue;
    auto target = c.coefficient(alpha, K).as_atom();
    if (!target || (*target)->kind != AtomKind::Unknown || !(*target)->args_are_params() ||
        (*target)->derivative_order() != 0)
      throw std::invalid_argument("coefficient " + label + " is not a bare unknown function");
    auto value = solve_linear(sys.equations[k].second, *target);
    if (!value) throw std::invalid_argument("equation for " + label + " is not affine in " + (*target)->name);
    solved.emplace_back(UnknownFunction{(*target)->name, (*target)->params}, *value);
  }
  LabeledExpressions out;
  for (const auto& r : curvature(c)) {
    Expression v = r.value;
    for (const auto& [f, body] : solved) v = substitute_unknown(v, f, body);
    out.emplace_back(r.label, v);
  }
  return out;
}

HjReport check_hj_solution(const SolvedPde& s, const HolonomicConnection& c, const ZeroTestPolicy& policy) {
  if (c.order() >= s.order()) throw std::invalid_argument("connection order must be below the equation order");
  HjReport rep{is_flat(c, policy), {}};
  // Containment is evaluated even when flatness fails, so the report can
  // show both witnesses; the verdict still requires both.
  auto flat = rep.flatness.passed() ? FlatnessWitness::from_check(rep.flatness)
                                    : FlatnessWitness::attest("diagnostic only: connection not flat");
  const Bundle& b = s.bundle();
  LabeledExpressions items;
  for (const Rule& r : s.rules())
    items.emplace_back(b.jet_name(r.alpha, r.K), c.lifted(r.alpha, r.K) - pullback_prolongation(c, r.rhs, flat));
  rep.containment = run_checks("containment", std::move(items), policy);
  return rep;
}

namespace {

std::string latex_text(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '_' || c == '&' || c == '%' || c == '#' || c == '$') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string hj_report_latex(const std::string& title, const LabeledExpressions& equations, const HjReport* report) {
  std::ostringstream os;
  os << "% " << title << "\n\\begin{align*}\n";
  for (std::size_t k = 0; k < equations.size(); ++k) {
    os << "  \\text{" << latex_text(equations[k].first) << "}:&\\quad " << to_latex(equations[k].second) << " = 0";
    os << (k + 1 < equations.size() ? " \\\\\n" : "\n");
  }
  os << "\\end{align*}\n";
  if (report) {
    for (const CheckGroup* g : {&report->flatness, &report->containment}) {
      os << "% " << g->name << ": " << (g->passed() ? "pass" : "fail") << "\n";
      for (const auto& c : g->checks) os << "%   " << c.label << ": " << to_string(c.verdict.status) << "\n";
    }
  }
  return os.str();
}

}  // namespace hjkit
