#pragma once

#include "hjkit/connection.hpp"

namespace hjkit {

using LabeledExpressions = std::vector<std::pair<std::string, Expression>>;

/// Connection of order s whose coefficient for slot (a, M) is a fresh
/// unknown function "N" + u + suffix(M) of the base variables and all
/// u^b_J with |J| <= s.
HolonomicConnection generic_ansatz(BundlePtr bundle, int s);

struct HjSystem {
  HolonomicConnection connection;
  LabeledExpressions equations;  // one per rule: nabla_K u^a - pullback(f)
  std::vector<std::pair<int, MultiIndex>> leads;  // (a, K) of each rule
};

/// The s-th order generalized HJ system of S for `ansatz` (generic when
/// absent). Requires 0 <= s < order(S).
HjSystem generate_hj_system(const SolvedPde& s, int order, const std::optional<HolonomicConnection>& ansatz = {});

/// Closes the HJ system with flatness: every equation whose leading
/// coordinate has order s + 1 is solved for the matching coefficient unknown,
/// which is then eliminated from the curvature.
LabeledExpressions compose_with_flatness(const HjSystem& sys);

struct HjReport {
  CheckGroup flatness;
  CheckGroup containment;
  bool passed() const { return flatness.passed() && containment.passed(); }
};

/// Flatness plus containment nabla_K u^a - pullback(f) = 0 for every rule.
HjReport check_hj_solution(const SolvedPde& s, const HolonomicConnection& c, const ZeroTestPolicy& policy);

/// LaTeX rendering of generated equations and (optionally) verdicts.
std::string hj_report_latex(const std::string& title, const LabeledExpressions& equations,
                            const HjReport* report = nullptr);

}  // namespace hjkit
