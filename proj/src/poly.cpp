#include "hjkit/poly.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <map>
#include <stdexcept>

namespace hjkit {

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(Atom a, int exponent) {
  if (exponent < 0) throw std::invalid_argument("negative monomial exponent");
  if (exponent > 0) {
    factors_.emplace_back(a, exponent);
    degree_ = exponent;
  }
}

int Monomial::exponent_of(Atom a) const {
  for (const auto& [atom, e] : factors_)
    if (atom == a) return e;
  return 0;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial out;
  out.factors_.reserve(factors_.size() + other.factors_.size());
  auto i = factors_.begin();
  auto j = other.factors_.begin();
  while (i != factors_.end() && j != other.factors_.end()) {
    if (i->first == j->first) {
      out.factors_.emplace_back(i->first, i->second + j->second);
      ++i, ++j;
    } else if (compare_atoms(i->first, j->first) < 0) {
      out.factors_.push_back(*i++);
    } else {
      out.factors_.push_back(*j++);
    }
  }
  out.factors_.insert(out.factors_.end(), i, factors_.end());
  out.factors_.insert(out.factors_.end(), j, other.factors_.end());
  out.degree_ = degree_ + other.degree_;
  return out;
}

std::optional<Monomial> Monomial::divide(const Monomial& other) const {
  if (other.degree_ > degree_) return std::nullopt;
  Monomial out;
  auto i = factors_.begin();
  auto j = other.factors_.begin();
  while (j != other.factors_.end()) {
    if (i == factors_.end()) return std::nullopt;
    if (i->first == j->first) {
      if (i->second < j->second) return std::nullopt;
      if (i->second > j->second) out.factors_.emplace_back(i->first, i->second - j->second);
      ++i, ++j;
    } else if (compare_atoms(i->first, j->first) < 0) {
      out.factors_.push_back(*i++);
    } else {
      return std::nullopt;
    }
  }
  out.factors_.insert(out.factors_.end(), i, factors_.end());
  out.degree_ = degree_ - other.degree_;
  return out;
}

Monomial Monomial::without(Atom a) const {
  Monomial out;
  for (const auto& f : factors_) {
    if (f.first == a) continue;
    out.factors_.push_back(f);
    out.degree_ += f.second;
  }
  return out;
}

Monomial Monomial::gcd(const Monomial& a, const Monomial& b) {
  Monomial out;
  auto i = a.factors_.begin();
  auto j = b.factors_.begin();
  while (i != a.factors_.end() && j != b.factors_.end()) {
    if (i->first == j->first) {
      int e = std::min(i->second, j->second);
      out.factors_.emplace_back(i->first, e);
      out.degree_ += e;
      ++i, ++j;
    } else if (compare_atoms(i->first, j->first) < 0) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

int compare_monomials(const Monomial& a, const Monomial& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree() ? -1 : 1;
  const auto& fa = a.factors();
  const auto& fb = b.factors();
  std::size_t n = std::min(fa.size(), fb.size());
  for (std::size_t k = 0; k < n; ++k) {
    if (fa[k].first != fb[k].first) {
      // The monomial holding the smaller (more significant) atom is larger.
      return compare_atoms(fa[k].first, fb[k].first) < 0 ? 1 : -1;
    }
    if (fa[k].second != fb[k].second) return fa[k].second < fb[k].second ? -1 : 1;
  }
  if (fa.size() == fb.size()) return 0;
  return fa.size() > fb.size() ? 1 : -1;
}

// -------------------------------------------------------------- Polynomial

namespace {

bool term_greater(const Term& a, const Term& b) {
  return compare_monomials(a.monomial, b.monomial) > 0;
}

}  // namespace

Polynomial::Polynomial(const Rational& c) {
  if (c != 0) terms_.push_back({Monomial{}, c});
}

Polynomial::Polynomial(Atom a) { terms_.push_back({Monomial{a}, Rational(1)}); }

Polynomial::Polynomial(Monomial m, const Rational& c) {
  if (c != 0) terms_.push_back({std::move(m), c});
}

Polynomial Polynomial::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), term_greater);
  Polynomial out;
  out.terms_.reserve(terms.size());
  for (auto& t : terms) {
    if (!out.terms_.empty() && out.terms_.back().monomial == t.monomial) {
      out.terms_.back().coeff += t.coeff;
    } else {
      if (!out.terms_.empty() && out.terms_.back().coeff == 0) out.terms_.pop_back();
      out.terms_.push_back(std::move(t));
    }
  }
  if (!out.terms_.empty() && out.terms_.back().coeff == 0) out.terms_.pop_back();
  return out;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].monomial.is_one());
}

bool Polynomial::is_one() const {
  return terms_.size() == 1 && terms_[0].monomial.is_one() && terms_[0].coeff == 1;
}

Rational Polynomial::constant_value() const {
  if (terms_.empty()) return 0;
  const Term& last = terms_.back();
  return last.monomial.is_one() ? last.coeff : Rational(0);
}

int Polynomial::total_degree() const {
  return terms_.empty() ? -1 : terms_.front().monomial.degree();
}

int Polynomial::degree_in(Atom a) const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, t.monomial.exponent_of(a));
  return d;
}

std::vector<Atom> Polynomial::atoms() const {
  std::vector<Atom> out;
  for (const auto& t : terms_)
    for (const auto& f : t.monomial.factors()) out.push_back(f.first);
  std::sort(out.begin(), out.end(), AtomLess{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Polynomial Polynomial::operator-() const {
  Polynomial out = *this;
  for (auto& t : out.terms_) t.coeff = -t.coeff;
  return out;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  if (o.is_zero()) return *this;
  if (is_zero()) return o;
  Polynomial out;
  out.terms_.reserve(terms_.size() + o.terms_.size());
  auto i = terms_.begin();
  auto j = o.terms_.begin();
  while (i != terms_.end() && j != o.terms_.end()) {
    int c = compare_monomials(i->monomial, j->monomial);
    if (c == 0) {
      Rational s = i->coeff + j->coeff;
      if (s != 0) out.terms_.push_back({i->monomial, s});
      ++i, ++j;
    } else if (c > 0) {
      out.terms_.push_back(*i++);
    } else {
      out.terms_.push_back(*j++);
    }
  }
  out.terms_.insert(out.terms_.end(), i, terms_.end());
  out.terms_.insert(out.terms_.end(), j, o.terms_.end());
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (-o); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (is_zero() || o.is_zero()) return {};
  if (is_constant()) return o.scaled(terms_[0].coeff);
  if (o.is_constant()) return scaled(o.terms_[0].coeff);
  if (o.is_monomial()) return times(o.terms_[0].monomial).scaled(o.terms_[0].coeff);
  if (is_monomial()) return o.times(terms_[0].monomial).scaled(terms_[0].coeff);
  std::vector<Term> prod;
  prod.reserve(terms_.size() * o.terms_.size());
  for (const auto& a : terms_)
    for (const auto& b : o.terms_) prod.push_back({a.monomial * b.monomial, a.coeff * b.coeff});
  return from_terms(std::move(prod));
}

Polynomial Polynomial::scaled(const Rational& c) const {
  if (c == 0) return {};
  if (c == 1) return *this;
  Polynomial out = *this;
  for (auto& t : out.terms_) t.coeff *= c;
  return out;
}

Polynomial Polynomial::times(const Monomial& m) const {
  if (m.is_one()) return *this;
  // Multiplying by a monomial preserves the term order.
  Polynomial out = *this;
  for (auto& t : out.terms_) t.monomial = t.monomial * m;
  return out;
}

Polynomial Polynomial::pow(int e) const {
  if (e < 0) throw std::invalid_argument("negative polynomial power");
  Polynomial result(Rational(1));
  Polynomial base = *this;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

Polynomial Polynomial::derivative(Atom a) const {
  std::vector<Term> out;
  for (const auto& t : terms_) {
    int e = t.monomial.exponent_of(a);
    if (e == 0) continue;
    Monomial m = t.monomial.without(a);
    if (e > 1) m = m * Monomial(a, e - 1);
    out.push_back({std::move(m), t.coeff * e});
  }
  return from_terms(std::move(out));
}

std::optional<Polynomial> Polynomial::divide_exact(const Polynomial& d) const {
  if (d.is_zero()) throw std::domain_error("polynomial division by zero");
  if (is_zero()) return Polynomial{};
  if (d.is_constant()) return scaled(1 / d.terms_[0].coeff);
  if (d.is_monomial()) {
    Polynomial out;
    out.terms_.reserve(terms_.size());
    Rational inv = 1 / d.terms_[0].coeff;
    for (const auto& t : terms_) {
      auto q = t.monomial.divide(d.terms_[0].monomial);
      if (!q) return std::nullopt;
      out.terms_.push_back({std::move(*q), t.coeff * inv});
    }
    return out;
  }
  if (total_degree() < d.total_degree()) return std::nullopt;
  std::vector<Term> quotient;
  Polynomial rem = *this;
  const Term& lead = d.terms_.front();
  while (!rem.is_zero()) {
    const Term& lt = rem.terms_.front();
    auto m = lt.monomial.divide(lead.monomial);
    if (!m) return std::nullopt;
    Rational c = lt.coeff / lead.coeff;
    rem = rem - d.times(*m).scaled(c);
    quotient.push_back({std::move(*m), c});
  }
  return from_terms(std::move(quotient));
}

std::vector<Polynomial> Polynomial::coefficients_in(Atom a) const {
  std::vector<std::vector<Term>> buckets(degree_in(a) + 1);
  for (const auto& t : terms_) {
    int e = t.monomial.exponent_of(a);
    buckets[e].push_back({t.monomial.without(a), t.coeff});
  }
  std::vector<Polynomial> out;
  out.reserve(buckets.size());
  for (auto& b : buckets) out.push_back(from_terms(std::move(b)));
  return out;
}

Polynomial Polynomial::from_coefficients(const std::vector<Polynomial>& coeffs, Atom a) {
  std::vector<Term> out;
  for (std::size_t e = 0; e < coeffs.size(); ++e)
    for (const auto& t : coeffs[e].terms_)
      out.push_back({e == 0 ? t.monomial : t.monomial * Monomial(a, static_cast<int>(e)), t.coeff});
  return from_terms(std::move(out));
}

Monomial Polynomial::monomial_content() const {
  if (terms_.empty()) return {};
  Monomial g = terms_[0].monomial;
  for (std::size_t k = 1; k < terms_.size() && !g.is_one(); ++k) g = Monomial::gcd(g, terms_[k].monomial);
  return g;
}

Rational Polynomial::normalizer() const {
  if (terms_.empty()) return 1;
  Integer den_lcm = 1;
  for (const auto& t : terms_) mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), t.coeff.get_den_mpz_t());
  Integer num_gcd = 0;
  for (const auto& t : terms_) {
    Integer scaled_num = t.coeff.get_num() * (den_lcm / t.coeff.get_den());
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), scaled_num.get_mpz_t());
  }
  Rational f(den_lcm, num_gcd);
  f.canonicalize();
  if (terms_.front().coeff < 0) f = -f;
  return f;
}

bool Polynomial::operator==(const Polynomial& o) const {
  if (terms_.size() != o.terms_.size()) return false;
  for (std::size_t k = 0; k < terms_.size(); ++k)
    if (terms_[k].coeff != o.terms_[k].coeff || !(terms_[k].monomial == o.terms_[k].monomial)) return false;
  return true;
}

// --------------------------------------------------------------------- gcd

namespace {

using UPoly = std::vector<Polynomial>;  // coefficient k multiplies x^k

void trim(UPoly& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

int udeg(const UPoly& p) { return static_cast<int>(p.size()) - 1; }

UPoly uscale(const UPoly& p, const Polynomial& c) {
  UPoly out;
  out.reserve(p.size());
  for (const auto& q : p) out.push_back(q * c);
  return out;
}

UPoly prem(UPoly a, const UPoly& b) {
  int n = udeg(b);
  const Polynomial& lcb = b.back();
  int e = udeg(a) - n + 1;
  while (!a.empty() && udeg(a) >= n) {
    int shift = udeg(a) - n;
    Polynomial lca = a.back();
    for (auto& q : a) q = q * lcb;
    for (int k = 0; k <= n; ++k) a[k + shift] = a[k + shift] - lca * b[k];
    trim(a);
    --e;
  }
  if (e > 0) a = uscale(a, lcb.pow(e));
  return a;
}

Polynomial content(const UPoly& p) {
  Polynomial g;
  for (const auto& q : p) {
    g = gcd(g, q);
    if (g.is_constant()) return Polynomial(Rational(1));
  }
  return g;
}

UPoly divide_all(const UPoly& p, const Polynomial& d) {
  UPoly out;
  out.reserve(p.size());
  for (const auto& q : p) {
    auto r = q.divide_exact(d);
    if (!r) throw std::logic_error("inexact division in polynomial gcd");
    out.push_back(std::move(*r));
  }
  return out;
}

// Subresultant PRS; returns the last nonzero remainder (not primitive).
UPoly subresultant_gcd(UPoly a, UPoly b) {
  if (udeg(a) < udeg(b)) std::swap(a, b);
  Polynomial g(Rational(1));
  Polynomial h(Rational(1));
  while (true) {
    int d = udeg(a) - udeg(b);
    UPoly r = prem(a, b);
    if (r.empty()) return b;
    if (udeg(r) == 0) return UPoly{Polynomial(Rational(1))};
    a = std::move(b);
    b = divide_all(r, g * h.pow(d));
    g = a.back();
    if (d == 0) {
      // h unchanged
    } else if (d == 1) {
      h = g;
    } else {
      auto q = g.pow(d).divide_exact(h.pow(d - 1));
      if (!q) throw std::logic_error("inexact subresultant update");
      h = std::move(*q);
    }
  }
}

// Univariate image of p in x after fixing every other atom.
std::vector<Rational> univariate_image(const Polynomial& p, Atom x, const std::map<Atom, Rational, AtomLess>& at) {
  std::vector<Rational> out(static_cast<std::size_t>(p.degree_in(x)) + 1);
  for (const auto& t : p.terms()) {
    Rational c = t.coeff;
    int k = 0;
    for (const auto& [a, e] : t.monomial.factors()) {
      if (a == x) {
        k = e;
        continue;
      }
      Rational v = at.at(a);
      for (int j = 0; j < e; ++j) c *= v;
    }
    out[static_cast<std::size_t>(k)] += c;
  }
  return out;
}

void utrim(std::vector<Rational>& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

int ugcd_degree(std::vector<Rational> a, std::vector<Rational> b) {
  utrim(a);
  utrim(b);
  while (!b.empty()) {
    if (a.size() < b.size()) std::swap(a, b);
    while (a.size() >= b.size() && !a.empty()) {
      Rational q = a.back() / b.back();
      std::size_t shift = a.size() - b.size();
      for (std::size_t k = 0; k < b.size(); ++k) a[k + shift] -= q * b[k];
      a.pop_back();
      utrim(a);
    }
    std::swap(a, b);
  }
  return static_cast<int>(a.size()) - 1;
}

// Sound coprimality certificate: if for every shared atom x some evaluation of
// the other atoms keeps deg_x and yields coprime univariate images, the gcd has
// degree 0 in every atom. A false return is inconclusive.
bool certainly_coprime(const Polynomial& a, const Polynomial& b, const std::vector<Atom>& common) {
  std::vector<Atom> all = a.atoms();
  for (Atom v : b.atoms()) all.push_back(v);
  std::sort(all.begin(), all.end(), AtomLess{});
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;
  std::map<Atom, Rational, AtomLess> at;
  for (Atom v : all) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    at[v] = Rational(static_cast<long>((state >> 33) % 89) + 3, static_cast<long>((state >> 20) % 7) + 1);
  }
  for (Atom x : common) {
    auto ia = univariate_image(a, x, at);
    auto ib = univariate_image(b, x, at);
    if (ia.back() == 0 && ib.back() == 0) return false;
    if (ugcd_degree(std::move(ia), std::move(ib)) > 0) return false;
  }
  return true;
}

Polynomial strip_monomial(const Polynomial& p, const Monomial& m) {
  if (m.is_one()) return p;
  auto q = p.divide_exact(Polynomial(m, Rational(1)));
  return std::move(*q);
}

}  // namespace

Polynomial gcd(const Polynomial& a_in, const Polynomial& b_in) {
  if (a_in.is_zero()) return b_in.normalized();
  if (b_in.is_zero()) return a_in.normalized();
  if (a_in.is_constant() || b_in.is_constant()) return Polynomial(Rational(1));
  if (a_in.is_monomial() || b_in.is_monomial()) {
    const Polynomial& mono = a_in.is_monomial() ? a_in : b_in;
    const Polynomial& other = a_in.is_monomial() ? b_in : a_in;
    Monomial g = Monomial::gcd(mono.leading().monomial, other.monomial_content());
    return Polynomial(g, Rational(1));
  }
  if (a_in == b_in) return a_in.normalized();

  Monomial ma = a_in.monomial_content();
  Monomial mb = b_in.monomial_content();
  Monomial mg = Monomial::gcd(ma, mb);
  Polynomial a = strip_monomial(a_in, ma);
  Polynomial b = strip_monomial(b_in, mb);

  std::vector<Atom> va = a.atoms();
  std::vector<Atom> vb = b.atoms();
  std::vector<Atom> common;
  std::set_intersection(va.begin(), va.end(), vb.begin(), vb.end(), std::back_inserter(common), AtomLess{});
  if (common.empty()) return Polynomial(mg, Rational(1));
  if (certainly_coprime(a, b, common)) return Polynomial(mg, Rational(1));

  Atom x = common.front();
  int best = std::max(a.degree_in(x), b.degree_in(x));
  for (Atom c : common) {
    int d = std::max(a.degree_in(c), b.degree_in(c));
    if (d < best) best = d, x = c;
  }

  UPoly ua = a.coefficients_in(x);
  UPoly ub = b.coefficients_in(x);
  Polynomial ca = content(ua);
  Polynomial cb = content(ub);
  Polynomial cg = gcd(ca, cb);
  if (!ca.is_one()) ua = divide_all(ua, ca);
  if (!cb.is_one()) ub = divide_all(ub, cb);

  UPoly r = subresultant_gcd(std::move(ua), std::move(ub));
  if (udeg(r) > 0) {
    Polynomial cr = content(r);
    if (!cr.is_one()) r = divide_all(r, cr);
  } else {
    r = UPoly{Polynomial(Rational(1))};
  }
  Polynomial result = Polynomial::from_coefficients(r, x) * cg;
  return result.times(mg).normalized();
}

}  // namespace hjkit
