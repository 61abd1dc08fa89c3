#pragma once

#include "hjkit/connection.hpp"

#include <iosfwd>

namespace hjkit {

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform grid over the base. Node counts are (hi - lo)/h + 1 per axis.
struct GridSpec {
  std::vector<double> lo, hi, h;
  std::vector<int> path;  // integration order of base indices

  void validate(int n) const;
  int count(int axis) const;
  std::size_t node_count() const;
  double coordinate(int axis, int index) const;
};

/// Values of every u^a_I, |I| <= k, at every grid node. Nodes are stored
/// row-major in path order (the last path axis varies fastest).
struct SampledSection {
  GridSpec grid;
  std::vector<Atom> base;    // x^i in declaration order
  std::vector<Atom> coords;  // jet coordinates, canonical order
  std::vector<double> values;
  std::string connection;
  double defect = 0.0;  // max |path - reversed path|

  std::size_t node_index(const std::vector<int>& idx) const;
  std::vector<int> node_at(std::size_t linear) const;
  double value(std::size_t node, std::size_t coord) const { return values[node * coords.size() + coord]; }
  std::optional<std::size_t> coord_index(Atom a) const;
  void write_csv(std::ostream& os) const;
};

/// Integrates the nabla-constant section through `initial`. The initial
/// point must be a grid node; `initial` binds every u^a_I with |I| <= k.
/// Parameters must already be substituted (or given in `params`).
SampledSection integrate_section(const HolonomicConnection& c, const std::vector<double>& base_point,
                                 const PointValues& initial, const GridSpec& grid, const FlatnessWitness& flat,
                                 const PointValues& params = {});

struct ResidualReport {
  double max_abs = 0.0;
  std::vector<double> argmax;  // base point
  std::string rule;            // rule attaining the maximum
  std::size_t points = 0;
  std::vector<std::pair<std::string, double>> per_rule;
};

/// Closed form u^a = expression of base variables and parameters.
using ClosedForm = std::vector<Expression>;

/// Residual of S on a closed-form section at the given base points;
/// jet coordinates come from exact symbolic differentiation.
ResidualReport residual(const SolvedPde& s, const ClosedForm& u, const std::vector<std::vector<double>>& points,
                        const PointValues& params = {});

enum class DerivativeSource {
  Lift,        // higher jets from the connection (exact along a nabla-constant section)
  Difference,  // centered differences of order h^2 from the sampled values
};

/// Residual of S on a sampled section at every node where the derivative
/// source is available (all nodes for Lift, interior nodes for Difference).
ResidualReport residual(const SolvedPde& s, const SampledSection& section, DerivativeSource source,
                        const HolonomicConnection* c = nullptr, const PointValues& params = {});

/// Max |section - closed form| over nodes, for the zeroth-order coordinates.
double max_error(const SampledSection& section, const Bundle& b, const ClosedForm& u, const PointValues& params = {});

}  // namespace hjkit
