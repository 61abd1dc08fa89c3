#include "hjkit/connection.hpp"

namespace hjkit {

HolonomicConnection::HolonomicConnection(BundlePtr bundle, int k, CoefficientMap coefficients)
    : bundle_(std::move(bundle)), k_(k), coeffs_(std::move(coefficients)) {
  const Bundle& b = *bundle_;
  if (k_ < 0) throw std::invalid_argument("connection order must be non-negative");
  for (const auto& [key, value] : coeffs_) {
    const auto& [alpha, M] = key;
    if (alpha < 0 || alpha >= b.m() || static_cast<int>(M.size()) != b.n() || hjkit::order(M) != k_ + 1)
      throw std::invalid_argument("connection coefficient slot out of range");
    if (b.jet_order(value) > k_)
      throw OrderError("coefficient " + b.jet_name(alpha, M) + " has jet order " +
                       std::to_string(b.jet_order(value)) + " > " + std::to_string(k_));
    for (Atom a : free_symbols(value))
      if (a->role == SymbolRole::Momentum) throw std::invalid_argument("connection coefficient uses a momentum");
  }
  for (int alpha = 0; alpha < b.m(); ++alpha)
    for (const auto& M : multi_indices_of_order(b.n(), k_ + 1))
      if (!coeffs_.count({alpha, M})) throw std::invalid_argument("missing connection coefficient " + b.jet_name(alpha, M));
}

const Expression& HolonomicConnection::coefficient(int alpha, const MultiIndex& M) const {
  return coeffs_.at({alpha, M});
}

HolonomicConnection HolonomicConnection::with_coefficient(int alpha, const MultiIndex& M, const Expression& v) const {
  CoefficientMap c = coeffs_;
  c.at({alpha, M}) = v;
  return HolonomicConnection(bundle_, k_, std::move(c));
}

Expression HolonomicConnection::nabla(const Expression& e, int i) const {
  const Bundle& b = *bundle_;
  return apply_derivation(e, [&](Atom a) -> std::optional<Expression> {
    if (a->role == SymbolRole::Base) return a->base == i ? std::optional<Expression>(1) : std::nullopt;
    if (a->role != SymbolRole::Jet) return std::nullopt;
    int o = hjkit::order(a->multi);
    if (o > k_) throw OrderError("nabla applied to " + a->name + " of order > " + std::to_string(k_));
    MultiIndex M = plus(a->multi, i);
    if (o < k_) return b.u(a->dep, M);
    return coeffs_.at({a->dep, M});
  });
}

Expression HolonomicConnection::lifted(int alpha, const MultiIndex& M) const {
  const int o = hjkit::order(M);
  if (o <= k_) return bundle_->u(alpha, M);
  if (o == k_ + 1) return coefficient(alpha, M);
  if (o > bundle_->order_cap()) throw OrderCapExceeded("jet order cap exceeded lifting " + bundle_->jet_name(alpha, M));
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    if (auto it = cache_->lifted.find({alpha, M}); it != cache_->lifted.end()) return it->second;
  }
  int j = 0;
  while (M[static_cast<std::size_t>(j)] == 0) ++j;
  Expression v = nabla(lifted(alpha, minus(M, j)), j);
  std::lock_guard<std::mutex> lock(cache_->mutex);
  cache_->lifted.emplace(std::make_pair(alpha, M), v);
  return v;
}

std::vector<CurvatureComponent> curvature(const HolonomicConnection& c) {
  const Bundle& b = c.bundle();
  std::vector<CurvatureComponent> out;
  for (int alpha = 0; alpha < b.m(); ++alpha)
    for (const auto& I : multi_indices_of_order(b.n(), c.order()))
      for (int i = 0; i < b.n(); ++i)
        for (int j = i + 1; j < b.n(); ++j) {
          Expression v = c.nabla(c.coefficient(alpha, plus(I, j)), i) - c.nabla(c.coefficient(alpha, plus(I, i)), j);
          std::string label = "R[" + b.jet_name(alpha, I) + ";" + b.base_names()[static_cast<std::size_t>(i)] + "," +
                              b.base_names()[static_cast<std::size_t>(j)] + "]";
          out.push_back({alpha, I, i, j, v, label});
        }
  return out;
}

CheckGroup is_flat(const HolonomicConnection& c, const ZeroTestPolicy& policy) {
  std::vector<std::pair<std::string, Expression>> items;
  for (auto& r : curvature(c)) items.emplace_back(r.label, r.value);
  return run_checks("flatness", std::move(items), policy);
}

FlatnessWitness FlatnessWitness::from_check(const CheckGroup& flatness) {
  if (!flatness.passed()) throw std::logic_error("connection is not flat");
  return FlatnessWitness(Source::Checked, flatness.exact() ? "zero-exact" : "zero-probabilistic");
}

FlatnessWitness FlatnessWitness::attest(std::string reason) { return FlatnessWitness(Source::Attested, std::move(reason)); }

const char* to_string(FlatnessWitness::Source s) {
  return s == FlatnessWitness::Source::Checked ? "checked" : "attested";
}

Expression nabla_iterated(const HolonomicConnection& c, const Expression& e, const MultiIndex& I,
                          const FlatnessWitness&) {
  Expression r = e;
  for (int i = 0; i < c.bundle().n(); ++i)
    for (int k = 0; k < I.at(static_cast<std::size_t>(i)); ++k) r = c.nabla(r, i);
  return r;
}

Expression pullback_prolongation(const HolonomicConnection& c, const Expression& e, const FlatnessWitness&) {
  const Bundle& b = c.bundle();
  Bindings bind;
  for (Atom a : free_symbols(e))
    if (b.is_jet(a) && hjkit::order(a->multi) > c.order()) bind[a] = c.lifted(a->dep, a->multi);
  return bind.empty() ? e : substitute(e, bind);
}

}  // namespace hjkit
