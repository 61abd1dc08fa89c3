#pragma once

#include "hjkit/hj.hpp"

namespace hjkit {

struct Lagrangian {
  BundlePtr bundle;
  Expression density;  // L on J^{k+1}
  /// k + 1; defaults to the jet order of the density (at least 1).
  int order = -1;

  const Bundle& b() const { return *bundle; }
  int top_order() const;
};

/// Coefficients T^{I.i}_a keyed by (a, I, i), |I| <= k.
using MomentumKey = std::tuple<int, MultiIndex, int>;
using MomentumSection = std::map<MomentumKey, Expression>;

/// delta L / delta u^a = sum_I (-1)^|I| D_I dL/du^a_I, one per dependent variable.
std::vector<Expression> euler_lagrange(const Lagrangian& lg);

/// Local Legendre form. With K = I + i:
///   T^{I.i} = (I_i + 1)/(|I| + 1) * sum_J (-1)^|J| (K,J)/C(|K|+|J|,|J|) D_J dL/du_{K+J}
/// which is the symmetric-index reading of the local formula fixed by the
/// first-variation identity.
MomentumSection legendre_local(const Lagrangian& lg);

/// Componentwise first-variation identity, one entry per (a, |I| <= k+1):
///   [I = 0] dL/du - dL/du_I + D_i T^{I.i} + sum_{i: I_i > 0} T^{(I-i).i}.
/// All entries vanish iff T is a Legendre form of L.
LabeledExpressions first_variation_defect(const Lagrangian& lg, const MomentumSection& t);

/// E = sum u^a_{I+i} p^{I.i}_a - L with momentum symbols p_u_I__i.
Expression hamiltonian_density(const Lagrangian& lg);
/// E with every momentum replaced by its coefficient in `t`.
Expression reduce_hamiltonian(const Lagrangian& lg, const MomentumSection& t);

/// sum_{i: K_i > 0} p^{(K-i).i}_a - dL/du^a_K for each |K| = k + 1.
LabeledExpressions constraint_equations(const Lagrangian& lg);

struct ElhEquation {
  std::string label;
  std::string lhs;  // rendered left side (divergences / derivatives)
  Expression rhs;
};

struct ElhSystem {
  std::vector<ElhEquation> constraints;  // I:   0 = constraint
  std::vector<ElhEquation> dynamics;     // II:  d_i p^{I.i} = dL/du_I - sum T^{(I-i).i}
  std::vector<ElhEquation> kinematics;   // III: d_i u_J = u_{J+i}
};

ElhSystem elh_system(const Lagrangian& lg);

/// Solved form of the EL system. `solve_for` names one leading jet variable
/// per dependent variable (in order); empty entries pick the highest-order
/// jet variable that occurs affinely with a constant coefficient.
SolvedPde euler_lagrange_system(const Lagrangian& lg, const std::vector<std::string>& solve_for = {});

/// Momentum section pulled back to J^k through the connection.
MomentumSection pullback_momenta(const HolonomicConnection& c, const MomentumSection& t, const FlatnessWitness& flat);

struct GeneralizedHjReport {
  CheckGroup flatness;
  CheckGroup constraints;
  CheckGroup field_equations;  // the D_i T relation pulled back through the connection
  /// Filled when the three checks pass: HJ check of the EL system.
  std::optional<HjReport> el_cross_check;
  bool passed() const;
};

/// Checks that (C, T) solves the generalized HJ problem for L. When `t` is
/// empty, the Legendre form of L pulled back through C is used.
GeneralizedHjReport check_generalized_hj(const Lagrangian& lg, const HolonomicConnection& c,
                                         const MomentumSection& t, const ZeroTestPolicy& policy,
                                         const std::vector<std::string>& solve_for = {});

std::string momentum_label(const Bundle& b, const MomentumKey& key);

}  // namespace hjkit
