#pragma once

#include "hjkit/numeric.hpp"
#include "hjkit/variational.hpp"

namespace hjkit {

struct SourceLoc {
  int line = 0;
  int column = 0;
  std::string str() const { return std::to_string(line) + ":" + std::to_string(column); }
};

/// Problem-file error with a 1-based line:column.
class ProblemError : public std::runtime_error {
 public:
  ProblemError(SourceLoc at, const std::string& msg) : std::runtime_error(at.str() + ": " + msg), at_(at), msg_(msg) {}
  SourceLoc where() const { return at_; }
  const std::string& message() const { return msg_; }

 private:
  SourceLoc at_;
  std::string msg_;
};

struct EquationBlock {
  std::string name;
  SourceLoc at;
  std::vector<Rule> rules;
};

struct ConnectionBlock {
  std::string name;
  SourceLoc at;
  int order = 0;
  CoefficientMap coefficients;
};

struct LagrangianBlock {
  std::string name;
  SourceLoc at;
  Expression density;
  int order = -1;
  std::vector<std::string> solve_for;
};

struct MomentaBlock {
  std::string name;
  SourceLoc at;
  MomentumSection values;
};

struct LieFieldBlock {
  std::string name;
  SourceLoc at;
  LieField field;
};

struct SolutionBlock {
  std::string name;
  SourceLoc at;
  ClosedForm u;
};

struct ParamsBlock {
  std::string name;
  SourceLoc at;
  std::vector<std::pair<std::string, Rational>> values;
};

/// A parsed problem file. Grammar:
///   file  := block+
///   block := kind name '{' entry ((';' | newline) entry)* '}'
///   kind  := bundle | equation | lagrangian | connection | momenta | lie_field | solution | params
/// Bundle entries: `base t, x`, `dependent u`, `params x0, c`, `unknown B(t, x, u)`, `order_cap 12`.
/// Other blocks hold `lhs = expression` entries plus `order k` (connection,
/// lagrangian) and `solve_for u_t, ...` (lagrangian). `#` starts a comment.
struct ProblemFile {
  std::string bundle_name;
  SourceLoc bundle_at;
  BundlePtr bundle;
  std::vector<EquationBlock> equations;
  std::vector<ConnectionBlock> connections;
  std::vector<LagrangianBlock> lagrangians;
  std::vector<MomentaBlock> momenta;
  std::vector<LieFieldBlock> lie_fields;
  std::vector<SolutionBlock> solutions;
  std::vector<ParamsBlock> params;

  /// Lookup by name; an empty name selects the only (or first) block of its kind.
  const EquationBlock& equation(const std::string& name = "") const;
  const ConnectionBlock& connection(const std::string& name = "") const;
  const LagrangianBlock& lagrangian(const std::string& name = "") const;
  const MomentaBlock& momenta_block(const std::string& name = "") const;
  const LieFieldBlock& lie_field(const std::string& name = "") const;
  const SolutionBlock& solution(const std::string& name = "") const;

  SolvedPde solved(const EquationBlock& e) const { return SolvedPde(bundle, e.rules); }
  HolonomicConnection make_connection(const ConnectionBlock& c) const {
    return HolonomicConnection(bundle, c.order, c.coefficients);
  }
  Lagrangian make_lagrangian(const LagrangianBlock& l) const { return {bundle, l.density, l.order}; }
  /// Parameter values from all params blocks, later blocks overriding.
  std::map<std::string, Rational> parameter_values() const;
};

/// `order_cap` > 0 overrides the bundle's declared cap.
ProblemFile parse_problem(std::string_view text, int order_cap = -1);
ProblemFile load_problem(const std::string& path, int order_cap = -1);
/// Substitutes numeric values for parameters in every block.
ProblemFile bind_parameters(const ProblemFile& p, const std::map<std::string, Rational>& values);
/// Canonical text; parse_problem(render_problem(p)) reproduces p.
std::string render_problem(const ProblemFile& p);

}  // namespace hjkit
