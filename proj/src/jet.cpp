#include "hjkit/jet.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <thread>

namespace hjkit {

// ------------------------------------------------------------ multi-indices

int order(const MultiIndex& I) { return std::accumulate(I.begin(), I.end(), 0); }

MultiIndex unit_index(int n, int i) {
  MultiIndex I(static_cast<std::size_t>(n), 0);
  I.at(static_cast<std::size_t>(i)) = 1;
  return I;
}

MultiIndex plus(const MultiIndex& I, const MultiIndex& J) {
  MultiIndex K = I;
  for (std::size_t a = 0; a < K.size(); ++a) K[a] += J.at(a);
  return K;
}

MultiIndex plus(const MultiIndex& I, int i) {
  MultiIndex K = I;
  ++K.at(static_cast<std::size_t>(i));
  return K;
}

MultiIndex minus(const MultiIndex& I, int i) {
  MultiIndex K = I;
  if (K.at(static_cast<std::size_t>(i)) < 1) throw std::invalid_argument("multi-index has no such factor");
  --K[static_cast<std::size_t>(i)];
  return K;
}

bool divides(const MultiIndex& K, const MultiIndex& M) {
  for (std::size_t a = 0; a < K.size(); ++a)
    if (K[a] > M.at(a)) return false;
  return true;
}

std::vector<MultiIndex> multi_indices_of_order(int n, int k) {
  std::vector<MultiIndex> out;
  MultiIndex cur(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == n - 1) {
      cur[static_cast<std::size_t>(pos)] = left;
      out.push_back(cur);
      return;
    }
    for (int v = left; v >= 0; --v) {
      cur[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, left - v);
    }
  };
  if (n > 0 && k >= 0) rec(0, k);
  return out;
}

std::vector<MultiIndex> multi_indices_up_to(int n, int k) {
  std::vector<MultiIndex> out;
  for (int j = 0; j <= k; ++j) {
    auto layer = multi_indices_of_order(n, j);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

Integer binomial(int n, int k) {
  Integer r;
  if (k < 0 || n < 0 || k > n) return 0;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

Integer multinomial(const MultiIndex& I, const MultiIndex& J) {
  Integer r = 1;
  for (std::size_t a = 0; a < I.size(); ++a) r *= binomial(I[a] + J.at(a), J.at(a));
  return r;
}

// ------------------------------------------------------------------ bundle

namespace {

bool is_identifier(const std::string& s, bool allow_underscore) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || (allow_underscore && c == '_'))) return false;
  return !elementary_from_name(s);
}

}  // namespace

Bundle::Bundle(std::vector<std::string> base, std::vector<std::string> dependent, std::vector<std::string> params)
    : base_(std::move(base)), deps_(std::move(dependent)), params_(std::move(params)) {
  if (base_.empty()) throw std::invalid_argument("bundle needs at least one base variable");
  if (deps_.empty()) throw std::invalid_argument("bundle needs at least one dependent variable");
  std::set<std::string> seen;
  auto claim = [&](const std::string& s, bool underscore) {
    if (!is_identifier(s, underscore)) throw std::invalid_argument("invalid name '" + s + "'");
    if (!seen.insert(s).second) throw std::invalid_argument("duplicate name '" + s + "'");
  };
  for (const auto& s : base_) claim(s, false);
  for (const auto& s : deps_) claim(s, false);
  for (const auto& s : params_) claim(s, true);
  for (std::size_t i = 0; i < base_.size(); ++i)
    base_atoms_.push_back(symbol_atom(base_[i], SymbolRole::Base, -1, {}, static_cast<int>(i)));
  for (const auto& p : params_) param_atoms_[p] = symbol_atom(p, SymbolRole::Parameter);
}

std::string Bundle::suffix(const MultiIndex& I) const {
  std::string s;
  for (int i = 0; i < n(); ++i)
    for (int c = 0; c < I.at(static_cast<std::size_t>(i)); ++c) s += base_[static_cast<std::size_t>(i)];
  return s;
}

std::string Bundle::jet_name(int alpha, const MultiIndex& I) const {
  std::string s = deps_.at(static_cast<std::size_t>(alpha));
  if (hjkit::order(I) > 0) s += "_" + suffix(I);
  return s;
}

std::string Bundle::momentum_name(int alpha, const MultiIndex& I, int i) const {
  std::string s = "p_" + deps_.at(static_cast<std::size_t>(alpha));
  if (hjkit::order(I) > 0) s += "_" + suffix(I);
  return s + "__" + base_.at(static_cast<std::size_t>(i));
}

Atom Bundle::jet(int alpha, const MultiIndex& I) const {
  if (static_cast<int>(I.size()) != n()) throw std::invalid_argument("multi-index length mismatch");
  return symbol_atom(jet_name(alpha, I), SymbolRole::Jet, alpha, I);
}

Atom Bundle::param(const std::string& name) const {
  auto it = param_atoms_.find(name);
  if (it == param_atoms_.end()) throw UndeclaredSymbol(name);
  return it->second;
}

Atom Bundle::momentum(int alpha, const MultiIndex& I, int i) const {
  return symbol_atom(momentum_name(alpha, I, i), SymbolRole::Momentum, alpha, I, i);
}

std::optional<int> Bundle::base_index(std::string_view name) const {
  for (std::size_t i = 0; i < base_.size(); ++i)
    if (base_[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

std::optional<int> Bundle::dependent_index(std::string_view name) const {
  for (std::size_t i = 0; i < deps_.size(); ++i)
    if (deps_[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

std::optional<MultiIndex> Bundle::parse_suffix(std::string_view s) const {
  MultiIndex I(static_cast<std::size_t>(n()), 0);
  std::size_t at = 0;
  while (at < s.size()) {
    int best = -1;
    std::size_t len = 0;
    for (std::size_t i = 0; i < base_.size(); ++i)
      if (base_[i].size() > len && s.substr(at, base_[i].size()) == base_[i])
        best = static_cast<int>(i), len = base_[i].size();
    if (best < 0) return std::nullopt;
    ++I[static_cast<std::size_t>(best)];
    at += len;
  }
  return I;
}

int Bundle::jet_order(const Expression& e) const {
  int k = -1;
  for (Atom a : free_symbols(e))
    if (is_jet(a)) k = std::max(k, hjkit::order(a->multi));
  return k;
}

std::vector<Atom> Bundle::jet_coordinates(int k) const {
  std::vector<Atom> out;
  for (int j = 0; j <= k; ++j)
    for (int alpha = 0; alpha < m(); ++alpha)
      for (const auto& I : multi_indices_of_order(n(), j)) out.push_back(jet(alpha, I));
  return out;
}

const UnknownFunction& Bundle::declare_unknown(const std::string& name, const std::vector<std::string>& params) {
  if (!is_identifier(name, false)) throw std::invalid_argument("invalid unknown name '" + name + "'");
  if (symbol(name)) throw std::invalid_argument("unknown '" + name + "' clashes with a symbol");
  UnknownFunction f{name, {}};
  for (const auto& p : params) {
    auto s = symbol(p);
    if (!s || !s->as_atom()) throw UndeclaredSymbol(p);
    f.params.push_back(*s->as_atom());
  }
  return unknowns_[name] = std::move(f);
}

std::optional<Expression> Bundle::symbol(std::string_view name) const {
  if (auto it = defs_.find(name); it != defs_.end()) return it->second;
  if (auto i = base_index(name)) return x(*i);
  if (auto it = param_atoms_.find(name); it != param_atoms_.end()) return Expression(it->second);
  if (auto a = dependent_index(name)) return u(*a);
  if (name.size() > 4 && name.substr(0, 2) == "p_") {
    auto sep = name.find("__");
    if (sep != std::string_view::npos) {
      std::string_view head = name.substr(2, sep - 2);
      auto i = base_index(name.substr(sep + 2));
      auto us = head.find('_');
      auto a = dependent_index(head.substr(0, us));
      std::optional<MultiIndex> I = MultiIndex(static_cast<std::size_t>(n()), 0);
      if (us != std::string_view::npos) I = parse_suffix(head.substr(us + 1));
      if (i && a && I) return Expression(momentum(*a, *I, *i));
    }
  }
  auto us = name.find('_');
  if (us != std::string_view::npos && us + 1 < name.size()) {
    if (auto a = dependent_index(name.substr(0, us)))
      if (auto I = parse_suffix(name.substr(us + 1))) return u(*a, *I);
  }
  return std::nullopt;
}

const UnknownFunction* Bundle::unknown(std::string_view name) const {
  auto it = unknowns_.find(name);
  return it == unknowns_.end() ? nullptr : &it->second;
}

// -------------------------------------------------------- total derivative

Expression total_derivative(const Bundle& b, const Expression& e, int i, int order_cap) {
  const int cap = order_cap >= 0 ? order_cap : b.order_cap();
  return apply_derivation(e, [&](Atom a) -> std::optional<Expression> {
    if (a->role == SymbolRole::Base) return a->base == i ? std::optional<Expression>(1) : std::nullopt;
    if (a->role == SymbolRole::Jet) {
      if (hjkit::order(a->multi) + 1 > cap)
        throw OrderCapExceeded("jet order cap " + std::to_string(cap) + " exceeded differentiating " + a->name);
      return b.u(a->dep, plus(a->multi, i));
    }
    return std::nullopt;
  });
}

Expression total_derivative(const Bundle& b, const Expression& e, const MultiIndex& I, int order_cap) {
  Expression r = e;
  for (int i = 0; i < b.n(); ++i)
    for (int c = 0; c < I.at(static_cast<std::size_t>(i)); ++c) r = total_derivative(b, r, i, order_cap);
  return r;
}

// ------------------------------------------------------------- solved PDE

SolvedPde::SolvedPde(BundlePtr bundle, std::vector<Rule> rules) : bundle_(std::move(bundle)), rules_(std::move(rules)) {
  if (rules_.empty()) throw std::invalid_argument("equation has no rules");
  std::set<std::pair<int, MultiIndex>> leading;
  for (const Rule& r : rules_) {
    if (r.alpha < 0 || r.alpha >= bundle_->m() || static_cast<int>(r.K.size()) != bundle_->n())
      throw std::invalid_argument("malformed rule");
    if (hjkit::order(r.K) < 1) throw std::invalid_argument("leading variable must be a derivative");
    if (!leading.insert({r.alpha, r.K}).second)
      throw std::invalid_argument("duplicate leading variable " + bundle_->jet_name(r.alpha, r.K));
    order_ = std::max({order_, hjkit::order(r.K), bundle_->jet_order(r.rhs)});
  }
  for (const Rule& r : rules_)
    for (Atom a : free_symbols(r.rhs))
      if (is_principal(a))
        throw std::invalid_argument("right-hand side of " + bundle_->jet_name(r.alpha, r.K) +
                                    " contains leading variable " + a->name);
}

bool SolvedPde::is_principal(int alpha, const MultiIndex& M) const {
  for (const Rule& r : rules_)
    if (r.alpha == alpha && divides(r.K, M)) return true;
  return false;
}

bool SolvedPde::is_principal(Atom a) const { return bundle_->is_jet(a) && is_principal(a->dep, a->multi); }

Expression SolvedPde::principal_value(int alpha, const MultiIndex& M) const {
  std::lock_guard<std::recursive_mutex> lock(cache_->mutex);
  auto key = std::make_pair(alpha, M);
  if (auto it = cache_->values.find(key); it != cache_->values.end()) return it->second;
  for (const Rule& r : rules_)
    if (r.alpha == alpha && r.K == M) return cache_->values[key] = r.rhs;
  if (!cache_->in_progress.insert(key).second)
    throw ReductionFailure("cyclic reduction at " + bundle_->jet_name(alpha, M) + " (system not orthonomic)");
  if (++cache_->computed > budget_) throw ReductionFailure("substitution budget exhausted");
  std::optional<Expression> value;
  for (int j = 0; j < bundle_->n() && !value; ++j) {
    if (M.at(static_cast<std::size_t>(j)) == 0) continue;
    MultiIndex lower = minus(M, j);
    if (!is_principal(alpha, lower)) continue;
    value = reduce(total_derivative(*bundle_, principal_value(alpha, lower), j));
  }
  cache_->in_progress.erase(key);
  if (!value) throw std::invalid_argument(bundle_->jet_name(alpha, M) + " is not principal");
  return cache_->values[key] = *value;
}

Expression SolvedPde::reduce(const Expression& e) const {
  Bindings b;
  for (Atom a : free_symbols(e))
    if (is_principal(a)) b[a] = principal_value(a->dep, a->multi);
  return b.empty() ? e : substitute(e, b);
}

SolvedPde prolong_system(const SolvedPde& s, int r) {
  if (r < 0) throw std::invalid_argument("prolongation order must be non-negative");
  if (r == 0) return s;
  const Bundle& b = s.bundle();
  std::vector<Rule> out;
  std::set<std::pair<int, MultiIndex>> seen;
  for (const Rule& rule : s.rules())
    for (const MultiIndex& J : multi_indices_up_to(b.n(), r)) {
      MultiIndex M = plus(rule.K, J);
      if (!seen.insert({rule.alpha, M}).second) continue;
      out.push_back({rule.alpha, M, s.principal_value(rule.alpha, M)});
    }
  return SolvedPde(s.bundle_ptr(), std::move(out));
}

// -------------------------------------------------------------- Lie fields

LieProlongation prolong_lie_field(const Bundle& b, const LieField& y, int r) {
  if (static_cast<int>(y.X.size()) != b.n() || static_cast<int>(y.Y.size()) != b.m())
    throw std::invalid_argument("Lie field component count mismatch");
  for (const auto* comps : {&y.X, &y.Y})
    for (const Expression& c : *comps)
      if (b.jet_order(c) > 0) throw std::invalid_argument("Lie point field components must live on E");
  LieProlongation out;
  out.base = y.X;
  for (int alpha = 0; alpha < b.m(); ++alpha) {
    Expression q = y.Y[static_cast<std::size_t>(alpha)];  // characteristic Y - u_i X^i
    for (int i = 0; i < b.n(); ++i) q -= b.u(alpha, unit_index(b.n(), i)) * y.X[static_cast<std::size_t>(i)];
    for (const MultiIndex& I : multi_indices_up_to(b.n(), r - 1)) {
      Expression c = total_derivative(b, q, I);
      for (int i = 0; i < b.n(); ++i) c += y.X[static_cast<std::size_t>(i)] * b.u(alpha, plus(I, i));
      out.vertical[{alpha, I}] = c;
    }
  }
  return out;
}

Expression LieProlongation::apply(const Bundle& b, const Expression& e) const {
  Expression r;
  for (int i = 0; i < b.n(); ++i) r += base.at(static_cast<std::size_t>(i)) * differentiate(e, b.base(i));
  for (Atom a : free_symbols(e)) {
    if (!b.is_jet(a)) continue;
    auto it = vertical.find({a->dep, a->multi});
    if (it == vertical.end()) throw OrderCapExceeded("Lie field not prolonged far enough for " + a->name);
    r += it->second * differentiate(e, a);
  }
  return r;
}

// ------------------------------------------------------------------ checks

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int n) { g_threads = std::max(1, n); }
int thread_count() { return g_threads; }

bool CheckGroup::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.verdict.is_zero(); });
}

bool CheckGroup::exact() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.verdict.status == ZeroStatus::ZeroExact; });
}

CheckGroup run_checks(std::string name, std::vector<std::pair<std::string, Expression>> items,
                      const ZeroTestPolicy& policy) {
  CheckGroup g{std::move(name), {}};
  g.checks.resize(items.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next++) < items.size();)
      g.checks[k] = {items[k].first, items[k].second, is_zero(items[k].second, policy)};
  };
  int workers = std::min<int>(thread_count(), static_cast<int>(items.size()));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return g;
}

CheckGroup is_lie_symmetry(const LieField& y, const SolvedPde& s, const ZeroTestPolicy& policy) {
  const Bundle& b = s.bundle();
  LieProlongation yk = prolong_lie_field(b, y, s.order() + 1);
  std::vector<std::pair<std::string, Expression>> items;
  for (const Rule& r : s.rules()) {
    Expression eq = b.u(r.alpha, r.K) - r.rhs;
    items.emplace_back(b.jet_name(r.alpha, r.K), s.reduce(yk.apply(b, eq)));
  }
  return run_checks("symmetry", std::move(items), policy);
}

}  // namespace hjkit
