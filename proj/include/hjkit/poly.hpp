#pragma once

#include <gmpxx.h>

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hjkit {

struct AtomData;
/// Interned, immutable indeterminate. Pointer identity is atom identity.
using Atom = const AtomData*;

/// Total order on atoms (defined with the atom table). Negative when a < b.
int compare_atoms(Atom a, Atom b);

struct AtomLess {
  bool operator()(Atom a, Atom b) const { return compare_atoms(a, b) < 0; }
};

using Rational = mpq_class;
using Integer = mpz_class;

/// Power product of atoms, factors sorted ascending by atom order.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(Atom a, int exponent = 1);

  const std::vector<std::pair<Atom, int>>& factors() const { return factors_; }
  int degree() const { return degree_; }
  bool is_one() const { return factors_.empty(); }
  int exponent_of(Atom a) const;

  Monomial operator*(const Monomial& other) const;
  /// Exact quotient, or nullopt when `other` does not divide *this.
  std::optional<Monomial> divide(const Monomial& other) const;
  Monomial without(Atom a) const;
  static Monomial gcd(const Monomial& a, const Monomial& b);

  bool operator==(const Monomial& other) const { return factors_ == other.factors_; }

 private:
  std::vector<std::pair<Atom, int>> factors_;
  int degree_ = 0;
};

/// Graded-lexicographic comparison. Negative when a < b.
int compare_monomials(const Monomial& a, const Monomial& b);

struct Term {
  Monomial monomial;
  Rational coeff;
};

/// Sparse multivariate polynomial over Q. Terms are kept sorted by
/// descending graded-lex monomial order with nonzero coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(const Rational& c);
  explicit Polynomial(Atom a);
  Polynomial(Monomial m, const Rational& c);

  static Polynomial from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  bool is_one() const;
  bool is_monomial() const { return terms_.size() == 1; }
  /// Constant value; meaningful only when is_constant().
  Rational constant_value() const;
  const Term& leading() const { return terms_.front(); }
  int total_degree() const;
  int degree_in(Atom a) const;

  /// Atoms that occur in some term, ascending.
  std::vector<Atom> atoms() const;

  Polynomial operator-() const;
  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial scaled(const Rational& c) const;
  Polynomial times(const Monomial& m) const;
  Polynomial pow(int e) const;

  /// Partial derivative with respect to an atom treated as an indeterminate.
  Polynomial derivative(Atom a) const;

  /// Exact quotient; nullopt if `d` does not divide *this.
  std::optional<Polynomial> divide_exact(const Polynomial& d) const;

  /// Coefficients of the univariate view in `a`; index = power of `a`.
  std::vector<Polynomial> coefficients_in(Atom a) const;
  static Polynomial from_coefficients(const std::vector<Polynomial>& coeffs, Atom a);

  /// gcd of monomials over all terms.
  Monomial monomial_content() const;

  /// Multiplier that turns *this into a primitive integer polynomial
  /// with positive leading coefficient.
  Rational normalizer() const;
  Polynomial normalized() const { return is_zero() ? *this : scaled(normalizer()); }

  bool operator==(const Polynomial& o) const;
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

 private:
  std::vector<Term> terms_;
};

/// Greatest common divisor over Q, normalized (primitive over Z with a
/// positive leading coefficient). gcd(0, 0) = 0.
Polynomial gcd(const Polynomial& a, const Polynomial& b);

}  // namespace hjkit
