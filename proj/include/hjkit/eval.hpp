#pragma once

#include "hjkit/expr.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace hjkit {

class EvalError : public std::runtime_error {
 public:
  enum class Kind { Pole, Domain, Unbound, NotEvaluable };
  EvalError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

using PointValues = std::map<Atom, double, AtomLess>;

/// Double-precision value of e at a point. Poles and domain violations
/// raise EvalError instead of producing NaN.
double eval_point(const Expression& e, const PointValues& point);

/// Expression compiled for repeated evaluation over a fixed input ordering.
class Evaluator {
 public:
  /// With `unknowns_as_inputs`, each unknown-function atom is treated as an
  /// independent input; otherwise unknown functions make e non-evaluable.
  explicit Evaluator(const Expression& e, bool unknowns_as_inputs = false);
  /// Compiles with a caller-fixed input order; inputs must cover all free atoms.
  Evaluator(const Expression& e, const std::vector<Atom>& inputs);

  const std::vector<Atom>& inputs() const { return inputs_; }
  double operator()(std::span<const double> values) const { return evaluate(values, nullptr); }
  /// When `scale` is given it receives sum |numerator terms| / |denominator|.
  double evaluate(std::span<const double> values, double* scale) const;

 private:
  struct CTerm {
    double coeff;
    std::vector<std::pair<int, int>> factors;  // slot, exponent
  };
  struct CPoly {
    std::vector<CTerm> terms;
  };
  struct CRational {
    CPoly num, den;
  };
  struct FunctionSlot {
    ElementaryFn fn;
    CRational arg;
    int slot;
  };

  void compile(const Expression& e, const std::vector<Atom>* fixed_inputs, bool unknowns_as_inputs);
  CRational compile_rational(const Expression& e) const;
  static double eval_poly(const CPoly& p, const std::vector<double>& slots, double* abs_sum);
  static double eval_rational(const CRational& r, const std::vector<double>& slots, double* scale);

  std::vector<Atom> inputs_;
  std::map<Atom, int, AtomLess> slot_of_;
  std::vector<FunctionSlot> functions_;
  CRational top_;
  int slot_count_ = 0;
};

struct ZeroTestPolicy {
  enum class Mode { ExactOnly, ExactThenProbabilistic };
  Mode mode = Mode::ExactThenProbabilistic;
  int samples = 16;
  double box_lo = 0.5;
  double box_hi = 1.5;
  double tolerance = 1e-9;
  std::uint64_t seed = 20240611;
  int retries = 8;
};

enum class ZeroStatus { ZeroExact, ZeroProbabilistic, Nonzero, Indeterminate };

const char* to_string(ZeroStatus s);

struct ZeroVerdict {
  ZeroStatus status = ZeroStatus::Indeterminate;
  int samples = 0;
  double max_magnitude = 0.0;
  /// Assignment of free atoms where the expression is demonstrably nonzero.
  std::vector<std::pair<std::string, double>> witness;
  double witness_value = 0.0;
  std::string note;

  bool is_zero() const { return status == ZeroStatus::ZeroExact || status == ZeroStatus::ZeroProbabilistic; }
};

/// Two-tier zero test: exact on the canonical rational form, then (when the
/// policy allows and elementary functions are present) seeded sampling.
/// Unknown-function atoms are sampled as independent values.
ZeroVerdict is_zero(const Expression& e, const ZeroTestPolicy& policy = {});

}  // namespace hjkit
