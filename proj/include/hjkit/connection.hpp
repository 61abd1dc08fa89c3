#pragma once

#include "hjkit/jet.hpp"

namespace hjkit {

using CoefficientMap = std::map<std::pair<int, MultiIndex>, Expression>;

/// Holonomic connection in the k-th jet bundle: coefficients
/// nabla^a_M, |M| = k + 1, keyed by the unordered multi-index M = I + i.
class HolonomicConnection {
 public:
  HolonomicConnection(BundlePtr bundle, int k, CoefficientMap coefficients);

  const Bundle& bundle() const { return *bundle_; }
  const BundlePtr& bundle_ptr() const { return bundle_; }
  int order() const { return k_; }
  const CoefficientMap& coefficients() const { return coeffs_; }
  const Expression& coefficient(int alpha, const MultiIndex& M) const;
  /// Copy with one coefficient replaced.
  HolonomicConnection with_coefficient(int alpha, const MultiIndex& M, const Expression& value) const;

  /// nabla_i e for e on J^k.
  Expression nabla(const Expression& e, int i) const;
  /// Value of nabla_M u^a for any |M| (memoized; iterated in base order).
  Expression lifted(int alpha, const MultiIndex& M) const;

 private:
  BundlePtr bundle_;
  int k_;
  CoefficientMap coeffs_;
  struct Cache {
    std::mutex mutex;
    std::map<std::pair<int, MultiIndex>, Expression> lifted;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

class OrderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CurvatureComponent {
  int alpha;
  MultiIndex I;  // |I| = k
  int i, j;      // i < j
  Expression value;
  std::string label;
};

/// Coefficients of [nabla_i, nabla_j] on the top-order coordinates:
/// nabla_i nabla^a_{I+j} - nabla_j nabla^a_{I+i}, |I| = k, i < j.
std::vector<CurvatureComponent> curvature(const HolonomicConnection& c);
CheckGroup is_flat(const HolonomicConnection& c, const ZeroTestPolicy& policy);

/// Evidence that iterated derivatives are order independent: a passing
/// flatness check or an explicit caller attestation.
class FlatnessWitness {
 public:
  enum class Source { Checked, Attested };
  /// Throws std::logic_error unless `flatness` passed.
  static FlatnessWitness from_check(const CheckGroup& flatness);
  static FlatnessWitness attest(std::string reason);
  Source source() const { return source_; }
  const std::string& note() const { return note_; }

 private:
  FlatnessWitness(Source s, std::string note) : source_(s), note_(std::move(note)) {}
  Source source_;
  std::string note_;
};

const char* to_string(FlatnessWitness::Source s);

/// nabla_I e = nabla_{i1} ... nabla_{is} e in base order.
Expression nabla_iterated(const HolonomicConnection& c, const Expression& e, const MultiIndex& I,
                          const FlatnessWitness& flat);

/// Replaces every u^a_M with |M| > k by nabla_M u^a.
Expression pullback_prolongation(const HolonomicConnection& c, const Expression& e, const FlatnessWitness& flat);

}  // namespace hjkit
