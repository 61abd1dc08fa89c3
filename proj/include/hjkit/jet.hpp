#pragma once

#include "hjkit/eval.hpp"
#include "hjkit/parser.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

namespace hjkit {

/// Exponent vector (a_1, ..., a_n) over the base variables.
using MultiIndex = std::vector<int>;

int order(const MultiIndex& I);
MultiIndex unit_index(int n, int i);
MultiIndex plus(const MultiIndex& I, const MultiIndex& J);
MultiIndex plus(const MultiIndex& I, int i);
MultiIndex minus(const MultiIndex& I, int i);  // requires I_i >= 1
bool divides(const MultiIndex& K, const MultiIndex& M);  // K <= M componentwise
/// All multi-indices with |I| == k, lexicographically descending in the
/// exponent vector (for base (t, x): tt, tx, xx).
std::vector<MultiIndex> multi_indices_of_order(int n, int k);
/// All multi-indices with |I| <= k, by order then as above.
std::vector<MultiIndex> multi_indices_up_to(int n, int k);

/// prod_i C(a_i + b_i, b_i).
Integer multinomial(const MultiIndex& I, const MultiIndex& J);
Integer binomial(int n, int k);

class OrderCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Base variables, dependent variables, parameters and declared unknown
/// functions. Also the name resolver for expressions on the jet space:
///   x, t           base variables
///   u, u_x, u_tx   jet coordinates (suffix letters are base names; order irrelevant)
///   p_u__x, p_u_x__t   momentum coordinates p_u^{I.i}
///   B, B_xu        declared unknowns and their formal derivatives
class Bundle : public SymbolResolver {
 public:
  Bundle(std::vector<std::string> base, std::vector<std::string> dependent,
         std::vector<std::string> params = {});

  int n() const { return static_cast<int>(base_.size()); }
  int m() const { return static_cast<int>(deps_.size()); }
  const std::vector<std::string>& base_names() const { return base_; }
  const std::vector<std::string>& dependent_names() const { return deps_; }
  const std::vector<std::string>& param_names() const { return params_; }

  int order_cap() const { return order_cap_; }
  void set_order_cap(int cap) { order_cap_ = cap; }

  Atom base(int i) const { return base_atoms_.at(static_cast<std::size_t>(i)); }
  Expression x(int i) const { return Expression(base(i)); }
  Atom jet(int alpha, const MultiIndex& I) const;
  Expression u(int alpha, const MultiIndex& I) const { return Expression(jet(alpha, I)); }
  Expression u(int alpha) const { return u(alpha, MultiIndex(static_cast<std::size_t>(n()), 0)); }
  Atom param(const std::string& name) const;
  Atom momentum(int alpha, const MultiIndex& I, int i) const;

  std::string suffix(const MultiIndex& I) const;
  std::string jet_name(int alpha, const MultiIndex& I) const;
  std::string momentum_name(int alpha, const MultiIndex& I, int i) const;
  /// Parses a base-name string ("xt") into a multi-index.
  std::optional<MultiIndex> parse_suffix(std::string_view s) const;
  std::optional<int> base_index(std::string_view name) const;
  std::optional<int> dependent_index(std::string_view name) const;

  bool is_jet(Atom a) const { return a->is_symbol() && a->role == SymbolRole::Jet; }
  /// Highest jet order among the symbols of e (-1 when e has none).
  int jet_order(const Expression& e) const;
  /// All jet coordinates u^a_I with |I| <= k, by order, then alpha, then index.
  std::vector<Atom> jet_coordinates(int k) const;

  const UnknownFunction& declare_unknown(const std::string& name, const std::vector<std::string>& params);
  const std::map<std::string, UnknownFunction, std::less<>>& unknowns() const { return unknowns_; }

  /// Extra names (e.g. a fixture's own symbols) resolved before anything else.
  void define(const std::string& name, const Expression& value) { defs_[name] = value; }

  Expression parse(std::string_view text) const { return parse_expr(text, *this); }

  std::optional<Expression> symbol(std::string_view name) const override;
  const UnknownFunction* unknown(std::string_view name) const override;

 private:
  std::vector<std::string> base_, deps_, params_;
  std::vector<Atom> base_atoms_;
  std::map<std::string, Atom, std::less<>> param_atoms_;
  std::map<std::string, UnknownFunction, std::less<>> unknowns_;
  std::map<std::string, Expression, std::less<>> defs_;
  int order_cap_ = 12;
};

using BundlePtr = std::shared_ptr<const Bundle>;

/// D_i e. Throws OrderCapExceeded when a jet coordinate would pass the cap.
Expression total_derivative(const Bundle& b, const Expression& e, int i, int order_cap = -1);
/// D_I e, applied in base order.
Expression total_derivative(const Bundle& b, const Expression& e, const MultiIndex& I, int order_cap = -1);

struct Rule {
  int alpha = 0;
  MultiIndex K;
  Expression rhs;
};

/// PDE system in solved form u^a_K = f. Every jet coordinate u^a_M with M
/// a multiple of some leading K is principal; its value modulo the system is
/// obtained by differentiating a rule and reducing, memoized.
class SolvedPde {
 public:
  SolvedPde(BundlePtr bundle, std::vector<Rule> rules);

  const Bundle& bundle() const { return *bundle_; }
  const BundlePtr& bundle_ptr() const { return bundle_; }
  const std::vector<Rule>& rules() const { return rules_; }
  int order() const { return order_; }

  bool is_principal(int alpha, const MultiIndex& M) const;
  bool is_principal(Atom a) const;
  /// Reduced value of a principal coordinate.
  Expression principal_value(int alpha, const MultiIndex& M) const;
  /// Replaces every principal coordinate in e by its reduced value.
  Expression reduce(const Expression& e) const;

  /// Substitution budget guarding non-orthonomic input.
  void set_budget(std::size_t budget) { budget_ = budget; }

 private:
  BundlePtr bundle_;
  std::vector<Rule> rules_;
  int order_ = 0;
  std::size_t budget_ = 20000;

  struct Cache {
    std::recursive_mutex mutex;
    std::map<std::pair<int, MultiIndex>, Expression> values;
    std::set<std::pair<int, MultiIndex>> in_progress;
    std::size_t computed = 0;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

class ReductionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The order k + r system {u^a_{K+J} = reduced D_J f : |J| <= r}.
SolvedPde prolong_system(const SolvedPde& s, int r);

/// Lie point field X^i d/dx^i + Y^a d/du^a on E.
struct LieField {
  std::vector<Expression> X;  // size n
  std::vector<Expression> Y;  // size m
};

struct LieProlongation {
  std::vector<Expression> base;                              // X^i
  std::map<std::pair<int, MultiIndex>, Expression> vertical;  // coefficient of d/du^a_I
  /// Applies the prolonged field to e.
  Expression apply(const Bundle& b, const Expression& e) const;
};

/// Coefficients for all |I| < r: X^i u^a_{Ii} + D_I(Y^a - u^a_i X^i).
LieProlongation prolong_lie_field(const Bundle& b, const LieField& y, int r);

/// Check outcome for one expression.
struct Check {
  std::string label;
  Expression expr;
  ZeroVerdict verdict;
};

struct CheckGroup {
  std::string name;
  std::vector<Check> checks;
  bool passed() const;
  bool exact() const;  // every verdict zero-exact
};

/// Zero-tests each (label, expr) pair, possibly in parallel.
CheckGroup run_checks(std::string name, std::vector<std::pair<std::string, Expression>> items,
                      const ZeroTestPolicy& policy);

/// Y_k(u^a_K - f) reduced modulo the system, per rule.
CheckGroup is_lie_symmetry(const LieField& y, const SolvedPde& s, const ZeroTestPolicy& policy);

/// Worker threads used by parallel checks (default 1).
void set_thread_count(int n);
int thread_count();

}  // namespace hjkit
