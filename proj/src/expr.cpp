#include "hjkit/expr.hpp"

#include <algorithm>
#include <mutex>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace hjkit {

// -------------------------------------------------------------- atom table

namespace {

class AtomTable {
 public:
  Atom intern(AtomData&& data) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = table_.find(data.key);
    if (it != table_.end()) return it->second.get();
    auto owned = std::make_unique<AtomData>(std::move(data));
    Atom a = owned.get();
    table_.emplace(a->key, std::move(owned));
    return a;
  }

 private:
  std::mutex mutex_;
  std::unordered_map<std::string, std::unique_ptr<AtomData>> table_;
};

AtomTable& atom_table() {
  static AtomTable table;
  return table;
}

void merge_sorted(std::vector<Atom>& into, const std::vector<Atom>& from) {
  std::vector<Atom> out;
  std::set_union(into.begin(), into.end(), from.begin(), from.end(), std::back_inserter(out), AtomLess{});
  into = std::move(out);
}

void collect_arg_info(AtomData& d) {
  for (const auto& arg : d.args) {
    for (Atom a : arg.num().atoms()) {
      merge_sorted(d.free_symbols, a->is_symbol() ? std::vector<Atom>{a} : a->free_symbols);
      d.has_unknown |= a->kind == AtomKind::Unknown || a->has_unknown;
      d.has_elementary |= a->kind == AtomKind::Elementary || a->has_elementary;
    }
    for (Atom a : arg.den().atoms()) {
      merge_sorted(d.free_symbols, a->is_symbol() ? std::vector<Atom>{a} : a->free_symbols);
      d.has_unknown |= a->kind == AtomKind::Unknown || a->has_unknown;
      d.has_elementary |= a->kind == AtomKind::Elementary || a->has_elementary;
    }
  }
}

}  // namespace

int compare_atoms(Atom a, Atom b) {
  if (a == b) return 0;
  int c = a->key.compare(b->key);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

bool AtomData::args_are_params() const {
  if (args.size() != params.size()) return false;
  for (std::size_t k = 0; k < args.size(); ++k) {
    auto a = args[k].as_atom();
    if (!a || *a != params[k]) return false;
  }
  return true;
}

int AtomData::derivative_order() const {
  int s = 0;
  for (int d : deriv) s += d;
  return s;
}

Atom symbol_atom(const std::string& name, SymbolRole role, int dep, std::vector<int> multi, int base) {
  AtomData d;
  d.kind = AtomKind::Symbol;
  d.name = name;
  d.role = role;
  d.dep = dep;
  d.multi = std::move(multi);
  d.base = base;
  std::ostringstream key;
  key << '1' << name << '\x1f' << static_cast<int>(role) << ':' << dep << ':' << base << ':';
  for (int m : d.multi) key << m << ',';
  d.key = key.str();
  return atom_table().intern(std::move(d));
}

Expression symbol(const std::string& name) { return Expression(symbol_atom(name)); }

const char* elementary_name(ElementaryFn fn) {
  switch (fn) {
    case ElementaryFn::Exp: return "exp";
    case ElementaryFn::Ln: return "ln";
    case ElementaryFn::Sqrt: return "sqrt";
    case ElementaryFn::Sin: return "sin";
    case ElementaryFn::Cos: return "cos";
    case ElementaryFn::Tan: return "tan";
    case ElementaryFn::Sech: return "sech";
    case ElementaryFn::Tanh: return "tanh";
  }
  return "?";
}

std::optional<ElementaryFn> elementary_from_name(std::string_view name) {
  static const std::pair<const char*, ElementaryFn> table[] = {
      {"exp", ElementaryFn::Exp},   {"ln", ElementaryFn::Ln},     {"sqrt", ElementaryFn::Sqrt},
      {"sin", ElementaryFn::Sin},   {"cos", ElementaryFn::Cos},   {"tan", ElementaryFn::Tan},
      {"sech", ElementaryFn::Sech}, {"tanh", ElementaryFn::Tanh},
  };
  for (const auto& [n, f] : table)
    if (name == n) return f;
  return std::nullopt;
}

Expression apply(ElementaryFn fn, const Expression& arg) {
  if (arg.is_zero()) {
    switch (fn) {
      case ElementaryFn::Exp:
      case ElementaryFn::Cos:
      case ElementaryFn::Sech: return 1;
      case ElementaryFn::Sqrt:
      case ElementaryFn::Sin:
      case ElementaryFn::Tan:
      case ElementaryFn::Tanh: return 0;
      case ElementaryFn::Ln: throw std::domain_error("ln(0)");
    }
  }
  if (fn == ElementaryFn::Ln && arg == Expression(1)) return 0;
  if (fn == ElementaryFn::Sqrt && arg == Expression(1)) return 1;
  AtomData d;
  d.kind = AtomKind::Elementary;
  d.fn = fn;
  d.name = elementary_name(fn);
  d.args = {arg};
  d.key = std::string("3") + d.name + "(" + arg.key() + ")";
  d.has_elementary = true;
  collect_arg_info(d);
  return Expression(atom_table().intern(std::move(d)));
}

Expression apply_unknown(const UnknownFunction& f, std::vector<Expression> args, std::vector<int> deriv) {
  if (args.size() != f.params.size())
    throw std::invalid_argument("unknown function " + f.name + " expects " + std::to_string(f.params.size()) +
                                " arguments");
  if (deriv.empty()) deriv.assign(f.params.size(), 0);
  if (deriv.size() != f.params.size()) throw std::invalid_argument("derivative multiset size mismatch");
  AtomData d;
  d.kind = AtomKind::Unknown;
  d.name = f.name;
  d.params = f.params;
  d.deriv = std::move(deriv);
  d.args = std::move(args);
  std::ostringstream key;
  key << '2' << f.name << '[';
  for (int k : d.deriv) key << k << ',';
  key << "](";
  for (Atom p : f.params) key << p->name << ',';
  key << ")(";
  for (const auto& a : d.args) key << a.key() << ';';
  key << ')';
  d.key = key.str();
  d.has_unknown = true;
  collect_arg_info(d);
  return Expression(atom_table().intern(std::move(d)));
}

Expression apply_unknown(const UnknownFunction& f) {
  std::vector<Expression> args;
  for (Atom p : f.params) args.emplace_back(p);
  return apply_unknown(f, std::move(args));
}

// -------------------------------------------------------------- Expression

Expression::Expression() : node_(std::make_shared<Node>(Node{Polynomial{}, Polynomial(Rational(1))})) {}

Expression::Expression(int value)
    : node_(std::make_shared<Node>(Node{Polynomial(Rational(value)), Polynomial(Rational(1))})) {}

Expression::Expression(const Rational& value)
    : node_(std::make_shared<Node>(Node{Polynomial(value), Polynomial(Rational(1))})) {}

Expression::Expression(Atom atom)
    : node_(std::make_shared<Node>(Node{Polynomial(atom), Polynomial(Rational(1))})) {}

Expression Expression::polynomial(Polynomial p) {
  return Expression(std::make_shared<Node>(Node{std::move(p), Polynomial(Rational(1))}));
}

Expression Expression::fraction(Polynomial num, Polynomial den) {
  if (den.is_zero()) throw std::domain_error("division by zero");
  if (num.is_zero()) return Expression();
  if (!den.is_constant()) {
    Polynomial g = gcd(num, den);
    if (!g.is_one()) {
      num = *num.divide_exact(g);
      den = *den.divide_exact(g);
    }
  }
  Rational f = den.normalizer();
  if (f != 1) {
    num = num.scaled(f);
    den = den.scaled(f);
  }
  return Expression(std::make_shared<Node>(Node{std::move(num), std::move(den)}));
}

Rational Expression::constant_value() const {
  if (!is_constant()) throw std::logic_error("expression is not constant");
  return num().constant_value() / den().constant_value();
}

std::optional<Atom> Expression::as_atom() const {
  if (!den().is_one() || !num().is_monomial()) return std::nullopt;
  const Term& t = num().leading();
  if (t.coeff != 1 || t.monomial.factors().size() != 1 || t.monomial.factors()[0].second != 1)
    return std::nullopt;
  return t.monomial.factors()[0].first;
}

std::vector<Atom> Expression::atoms() const {
  std::vector<Atom> a = num().atoms();
  if (!den().is_constant()) merge_sorted(a, den().atoms());
  return a;
}

Expression Expression::operator-() const {
  return Expression(std::make_shared<Node>(Node{-num(), den()}));
}

Expression Expression::operator+(const Expression& o) const {
  if (o.is_zero()) return *this;
  if (is_zero()) return o;
  if (den() == o.den()) {
    if (den().is_one()) return polynomial(num() + o.num());
    return fraction(num() + o.num(), den());
  }
  if (den().is_one()) return fraction(num() * o.den() + o.num(), o.den());
  if (o.den().is_one()) return fraction(num() + o.num() * den(), den());
  Polynomial g = gcd(den(), o.den());
  Polynomial b1 = *den().divide_exact(g);
  Polynomial d1 = *o.den().divide_exact(g);
  Polynomial n = num() * d1 + o.num() * b1;
  Polynomial d = den() * d1;
  if (n.is_zero()) return Expression();
  if (g.is_one()) {
    Rational f = d.normalizer();
    return Expression(std::make_shared<Node>(Node{n.scaled(f), d.scaled(f)}));
  }
  return fraction(std::move(n), std::move(d));
}

Expression Expression::operator-(const Expression& o) const { return *this + (-o); }

Expression Expression::operator*(const Expression& o) const {
  if (is_zero() || o.is_zero()) return Expression();
  if (is_constant()) {
    Rational c = constant_value();
    return Expression(std::make_shared<Node>(Node{o.num().scaled(c), o.den()}));
  }
  if (o.is_constant()) {
    Rational c = o.constant_value();
    return Expression(std::make_shared<Node>(Node{num().scaled(c), den()}));
  }
  if (den().is_one() && o.den().is_one()) return polynomial(num() * o.num());
  Polynomial g1 = gcd(num(), o.den());
  Polynomial g2 = gcd(o.num(), den());
  Polynomial a = g1.is_one() ? num() : *num().divide_exact(g1);
  Polynomial d = g1.is_one() ? o.den() : *o.den().divide_exact(g1);
  Polynomial c = g2.is_one() ? o.num() : *o.num().divide_exact(g2);
  Polynomial b = g2.is_one() ? den() : *den().divide_exact(g2);
  Polynomial n = a * c;
  Polynomial q = b * d;
  Rational f = q.normalizer();
  return Expression(std::make_shared<Node>(Node{n.scaled(f), q.scaled(f)}));
}

Expression Expression::operator/(const Expression& o) const {
  if (o.is_zero()) throw std::domain_error("division by zero");
  Rational f = o.num().normalizer();
  Expression inv(std::make_shared<Node>(Node{o.den().scaled(f), o.num().scaled(f)}));
  return *this * inv;
}

Expression Expression::pow(int e) const {
  if (e == 0) return 1;
  if (e < 0) {
    if (is_zero()) throw std::domain_error("division by zero");
    Polynomial d = num().pow(-e);
    Rational f = d.normalizer();
    return Expression(std::make_shared<Node>(Node{den().pow(-e).scaled(f), d.scaled(f)}));
  }
  return Expression(std::make_shared<Node>(Node{num().pow(e), den().pow(e)}));
}

bool Expression::operator==(const Expression& o) const {
  return node_ == o.node_ || (num() == o.num() && den() == o.den());
}

namespace {

void append_poly_key(std::string& out, const Polynomial& p) {
  for (const auto& t : p.terms()) {
    out += t.coeff.get_str();
    for (const auto& [a, e] : t.monomial.factors()) {
      out += '*';
      out += a->key;
      if (e != 1) {
        out += '^';
        out += std::to_string(e);
      }
    }
    out += '+';
  }
}

}  // namespace

std::string Expression::key() const {
  std::string out = "{";
  append_poly_key(out, num());
  out += '/';
  append_poly_key(out, den());
  out += '}';
  return out;
}

// --------------------------------------------------------------- queries

std::vector<Atom> free_symbols(const Expression& e) {
  std::vector<Atom> out;
  for (Atom a : e.atoms()) merge_sorted(out, a->is_symbol() ? std::vector<Atom>{a} : a->free_symbols);
  return out;
}

bool contains_unknowns(const Expression& e) {
  for (Atom a : e.atoms())
    if (a->kind == AtomKind::Unknown || a->has_unknown) return true;
  return false;
}

bool contains_elementary(const Expression& e) {
  for (Atom a : e.atoms())
    if (a->kind == AtomKind::Elementary || a->has_elementary) return true;
  return false;
}

bool depends_on(const Expression& e, Atom s) {
  for (Atom a : e.atoms()) {
    if (a == s) return true;
    if (!a->is_symbol() && std::binary_search(a->free_symbols.begin(), a->free_symbols.end(), s, AtomLess{}))
      return true;
  }
  return false;
}

std::optional<Expression> solve_linear(const Expression& e, Atom a) {
  auto involves = [&](const Expression& x) {
    for (Atom b : all_atoms(x))
      if (b == a || (a->kind == AtomKind::Unknown && b->kind == AtomKind::Unknown && b->name == a->name)) return true;
    return false;
  };
  if (involves(Expression::polynomial(e.den()))) return std::nullopt;
  auto c = e.num().coefficients_in(a);
  if (c.size() != 2 || c[1].is_zero()) return std::nullopt;
  Expression c0 = Expression::polynomial(c[0]);
  Expression c1 = Expression::polynomial(c[1]);
  if (involves(c0) || involves(c1)) return std::nullopt;
  return -c0 / c1;
}

std::vector<Atom> all_atoms(const Expression& e) {
  std::vector<Atom> out;
  std::vector<Atom> stack = e.atoms();
  while (!stack.empty()) {
    Atom a = stack.back();
    stack.pop_back();
    if (std::find(out.begin(), out.end(), a) != out.end()) continue;
    out.push_back(a);
    for (const auto& arg : a->args)
      for (Atom b : arg.atoms()) stack.push_back(b);
  }
  std::sort(out.begin(), out.end(), AtomLess{});
  return out;
}

// ------------------------------------------------------------ derivations

namespace {

Expression elementary_derivative(ElementaryFn fn, const Expression& arg) {
  switch (fn) {
    case ElementaryFn::Exp: return apply(ElementaryFn::Exp, arg);
    case ElementaryFn::Ln: return Expression(1) / arg;
    case ElementaryFn::Sqrt: return Expression(Rational(1, 2)) / apply(ElementaryFn::Sqrt, arg);
    case ElementaryFn::Sin: return apply(ElementaryFn::Cos, arg);
    case ElementaryFn::Cos: return -apply(ElementaryFn::Sin, arg);
    case ElementaryFn::Tan: return apply(ElementaryFn::Cos, arg).pow(-2);
    case ElementaryFn::Sech: return -apply(ElementaryFn::Sech, arg) * apply(ElementaryFn::Tanh, arg);
    case ElementaryFn::Tanh: return apply(ElementaryFn::Sech, arg).pow(2);
  }
  return 0;
}

UnknownFunction declaration_of(Atom a) { return UnknownFunction{a->name, a->params}; }

class Deriver {
 public:
  explicit Deriver(const SymbolDerivation& on_symbol) : on_symbol_(on_symbol) {}

  Expression derive(const Expression& e) {
    std::vector<Atom> atoms = e.atoms();
    std::vector<std::pair<Atom, Expression>> d;
    bool all_polynomial = true;
    for (Atom a : atoms) {
      Expression da = atom_derivative(a);
      if (da.is_zero()) continue;
      all_polynomial &= da.is_polynomial();
      d.emplace_back(a, std::move(da));
    }
    if (d.empty()) return 0;
    if (all_polynomial) {
      Polynomial dn, dq;
      for (const auto& [a, da] : d) {
        Polynomial pn = e.num().derivative(a);
        if (!pn.is_zero()) dn = dn + pn * da.num();
        if (!e.den().is_constant()) {
          Polynomial pq = e.den().derivative(a);
          if (!pq.is_zero()) dq = dq + pq * da.num();
        }
      }
      if (dq.is_zero()) {
        if (e.den().is_one()) return Expression::polynomial(std::move(dn));
        return Expression::fraction(std::move(dn), e.den());
      }
      // (n/q)' = (n' (q/g) - n (q'/g)) / (q (q/g)) with g = gcd(q, q').
      Polynomial g = gcd(e.den(), dq);
      Polynomial qg = g.is_one() ? e.den() : *e.den().divide_exact(g);
      Polynomial dqg = g.is_one() ? dq : *dq.divide_exact(g);
      return Expression::fraction(dn * qg - e.num() * dqg, e.den() * qg);
    }
    Expression dn, dq;
    for (const auto& [a, da] : d) {
      Polynomial pn = e.num().derivative(a);
      if (!pn.is_zero()) dn += Expression::polynomial(pn) * da;
      if (!e.den().is_constant()) {
        Polynomial pq = e.den().derivative(a);
        if (!pq.is_zero()) dq += Expression::polynomial(pq) * da;
      }
    }
    Expression n = Expression::polynomial(e.num());
    Expression q = Expression::polynomial(e.den());
    if (dq.is_zero()) return dn / q;
    return (dn * q - n * dq) / (q * q);
  }

 private:
  Expression atom_derivative(Atom a) {
    auto it = memo_.find(a);
    if (it != memo_.end()) return it->second;
    Expression out;
    switch (a->kind) {
      case AtomKind::Symbol: {
        auto v = on_symbol_(a);
        if (v) out = *v;
        break;
      }
      case AtomKind::Elementary: {
        Expression darg = derive(a->args[0]);
        if (!darg.is_zero()) out = elementary_derivative(a->fn, a->args[0]) * darg;
        break;
      }
      case AtomKind::Unknown: {
        UnknownFunction f = declaration_of(a);
        for (std::size_t j = 0; j < a->args.size(); ++j) {
          Expression darg = derive(a->args[j]);
          if (darg.is_zero()) continue;
          std::vector<int> deriv = a->deriv;
          ++deriv[j];
          out += apply_unknown(f, a->args, std::move(deriv)) * darg;
        }
        break;
      }
    }
    memo_.emplace(a, out);
    return out;
  }

  const SymbolDerivation& on_symbol_;
  std::unordered_map<Atom, Expression> memo_;
};

}  // namespace

Expression apply_derivation(const Expression& e, const SymbolDerivation& on_symbol) {
  Deriver d(on_symbol);
  return d.derive(e);
}

Expression differentiate(const Expression& e, Atom s) {
  if (!s->is_symbol()) throw std::invalid_argument("differentiation variable must be a symbol");
  if (!depends_on(e, s)) return 0;
  return apply_derivation(e, [s](Atom a) -> std::optional<Expression> {
    if (a == s) return Expression(1);
    return std::nullopt;
  });
}

Expression differentiate(const Expression& e, const Expression& s) {
  auto a = s.as_atom();
  if (!a || !(*a)->is_symbol()) throw std::invalid_argument("differentiation variable must be a symbol");
  return differentiate(e, *a);
}

// ------------------------------------------------------------ substitution

namespace {

// Evaluates polynomial p at atom images, returned as numerator/denominator.
std::pair<Polynomial, Polynomial> evaluate_poly(const Polynomial& p,
                                                const std::unordered_map<Atom, Expression>& image) {
  // Largest exponent per atom fixes the common denominator.
  std::unordered_map<Atom, int> max_exp;
  for (const auto& t : p.terms())
    for (const auto& [a, e] : t.monomial.factors()) max_exp[a] = std::max(max_exp[a], e);

  std::unordered_map<Atom, std::vector<Polynomial>> num_pows, den_pows;
  auto power = [](std::unordered_map<Atom, std::vector<Polynomial>>& cache, Atom a, const Polynomial& base,
                  int e) -> const Polynomial& {
    auto& v = cache[a];
    if (v.empty()) v.push_back(Polynomial(Rational(1)));
    while (static_cast<int>(v.size()) <= e) v.push_back(v.back() * base);
    return v[e];
  };

  Polynomial common_den(Rational(1));
  for (const auto& [a, e] : max_exp) {
    const Expression& img = image.at(a);
    if (!img.den().is_one()) common_den = common_den * power(den_pows, a, img.den(), e);
  }
  Polynomial total;
  for (const auto& t : p.terms()) {
    Polynomial term(Monomial{}, t.coeff);
    for (const auto& [a, e] : t.monomial.factors()) {
      const Expression& img = image.at(a);
      term = term * power(num_pows, a, img.num(), e);
      if (!img.den().is_one() && max_exp[a] > e) term = term * power(den_pows, a, img.den(), max_exp[a] - e);
    }
    // Atoms absent from this term still contribute their full denominator power.
    for (const auto& [a, e] : max_exp) {
      const Expression& img = image.at(a);
      if (img.den().is_one() || t.monomial.exponent_of(a) > 0) continue;
      term = term * power(den_pows, a, img.den(), e);
    }
    total = total + term;
  }
  return {std::move(total), std::move(common_den)};
}

class Rewriter {
 public:
  explicit Rewriter(const AtomRewriter& rw) : rw_(rw) {}

  Expression rewrite(const Expression& e) {
    std::vector<Atom> atoms = e.atoms();
    if (atoms.empty()) return e;
    std::unordered_map<Atom, Expression> image;
    bool changed = false;
    for (Atom a : atoms) {
      Expression img = atom_image(a);
      auto same = img.as_atom();
      changed |= !(same && *same == a);
      image.emplace(a, std::move(img));
    }
    if (!changed) return e;
    auto [nn, nd] = evaluate_poly(e.num(), image);
    if (e.den().is_constant()) {
      Polynomial d = nd.scaled(e.den().constant_value());
      return Expression::fraction(std::move(nn), std::move(d));
    }
    auto [dn, dd] = evaluate_poly(e.den(), image);
    return Expression::fraction(nn * dd, nd * dn);
  }

 private:
  Expression atom_image(Atom a) {
    auto it = memo_.find(a);
    if (it != memo_.end()) return it->second;
    Expression out(a);
    if (a->is_symbol()) {
      if (rw_.on_symbol) {
        auto v = rw_.on_symbol(a);
        if (v) out = *v;
      }
    } else {
      std::vector<Expression> args;
      bool changed = false;
      for (const auto& arg : a->args) {
        args.push_back(rewrite(arg));
        changed |= args.back() != arg;
      }
      if (changed) {
        out = a->kind == AtomKind::Elementary ? apply(a->fn, args[0])
                                              : apply_unknown(declaration_of(a), std::move(args), a->deriv);
      }
      if (rw_.on_function) {
        auto rebuilt = out.as_atom();
        if (rebuilt) {
          auto v = rw_.on_function(*rebuilt);
          if (v) out = *v;
        }
      }
    }
    memo_.emplace(a, out);
    return out;
  }

  const AtomRewriter& rw_;
  std::unordered_map<Atom, Expression> memo_;
};

}  // namespace

Expression rewrite_atoms(const Expression& e, const AtomRewriter& rw) {
  Rewriter r(rw);
  return r.rewrite(e);
}

Expression substitute(const Expression& e, const Bindings& bindings) {
  if (bindings.empty()) return e;
  AtomRewriter rw;
  rw.on_symbol = [&bindings](Atom a) -> std::optional<Expression> {
    auto it = bindings.find(a);
    if (it == bindings.end()) return std::nullopt;
    return it->second;
  };
  return rewrite_atoms(e, rw);
}

Expression substitute_unknown(const Expression& e, const UnknownFunction& f, const Expression& body) {
  std::map<std::vector<int>, Expression> derivs;
  derivs.emplace(std::vector<int>(f.params.size(), 0), body);
  auto body_derivative = [&](const std::vector<int>& d) -> Expression {
    auto it = derivs.find(d);
    if (it != derivs.end()) return it->second;
    Expression r = body;
    for (std::size_t j = 0; j < d.size(); ++j)
      for (int k = 0; k < d[j]; ++k) r = differentiate(r, f.params[j]);
    derivs.emplace(d, r);
    return r;
  };
  AtomRewriter rw;
  rw.on_function = [&](Atom a) -> std::optional<Expression> {
    if (a->kind != AtomKind::Unknown || a->name != f.name) return std::nullopt;
    Expression r = body_derivative(a->deriv);
    if (a->args_are_params()) return r;
    Bindings b;
    for (std::size_t j = 0; j < f.params.size(); ++j) b.emplace(f.params[j], a->args[j]);
    return substitute(r, b);
  };
  return rewrite_atoms(e, rw);
}

// ----------------------------------------------------------------- printing

namespace {

std::string derivative_suffix(Atom a) {
  std::string s;
  for (std::size_t j = 0; j < a->deriv.size(); ++j)
    for (int k = 0; k < a->deriv[j]; ++k) s += a->params[j]->name;
  return s;
}

std::string monomial_text(const Monomial& m) {
  std::string out;
  for (const auto& [a, e] : m.factors()) {
    if (!out.empty()) out += '*';
    out += atom_text(a);
    if (e != 1) out += "^" + std::to_string(e);
  }
  return out;
}

std::string poly_text(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : p.terms()) {
    Rational c = t.coeff;
    bool neg = c < 0;
    if (neg) c = -c;
    if (first) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    first = false;
    if (t.monomial.is_one()) {
      out += c.get_str();
    } else if (c == 1) {
      out += monomial_text(t.monomial);
    } else {
      out += c.get_str() + "*" + monomial_text(t.monomial);
    }
  }
  return out;
}

bool needs_parens_as_divisor(const Polynomial& p) {
  if (!p.is_monomial()) return true;
  const Term& t = p.leading();
  if (t.monomial.is_one()) return false;
  return t.coeff != 1 || t.monomial.factors().size() > 1;
}

}  // namespace

std::string atom_text(Atom a) {
  switch (a->kind) {
    case AtomKind::Symbol: return a->name;
    case AtomKind::Elementary: return a->name + "(" + a->args[0].str() + ")";
    case AtomKind::Unknown: {
      std::string s = a->name;
      std::string suffix = derivative_suffix(a);
      if (!suffix.empty()) s += "_" + suffix;
      if (!a->args_are_params()) {
        s += "(";
        for (std::size_t j = 0; j < a->args.size(); ++j) s += (j ? ", " : "") + a->args[j].str();
        s += ")";
      }
      return s;
    }
  }
  return "?";
}

std::string Expression::str() const {
  if (den().is_one()) return poly_text(num());
  std::string n = poly_text(num());
  if (num().terms().size() > 1) n = "(" + n + ")";
  std::string d = poly_text(den());
  if (needs_parens_as_divisor(den())) d = "(" + d + ")";
  return n + "/" + d;
}

std::ostream& operator<<(std::ostream& os, const Expression& e) { return os << e.str(); }

namespace {

std::string latex_name(const std::string& name) {
  // u_xx -> u_{xx}
  auto us = name.find('_');
  if (us == std::string::npos) return name;
  std::string head = name.substr(0, us);
  std::string tail = name.substr(us + 1);
  for (auto& ch : tail)
    if (ch == '_') ch = ',';
  return head + "_{" + tail + "}";
}

std::string atom_latex(Atom a) {
  switch (a->kind) {
    case AtomKind::Symbol: return latex_name(a->name);
    case AtomKind::Elementary: {
      std::string arg = to_latex(a->args[0]);
      if (a->fn == ElementaryFn::Sqrt) return "\\sqrt{" + arg + "}";
      std::string name = a->fn == ElementaryFn::Sech ? "\\operatorname{sech}" : std::string("\\") + a->name;
      return name + "\\left(" + arg + "\\right)";
    }
    case AtomKind::Unknown: {
      std::string s = a->name;
      std::string suffix = derivative_suffix(a);
      if (!suffix.empty()) s += "_{" + suffix + "}";
      if (!a->args_are_params()) {
        s += "\\left(";
        for (std::size_t j = 0; j < a->args.size(); ++j) s += (j ? ", " : "") + to_latex(a->args[j]);
        s += "\\right)";
      }
      return s;
    }
  }
  return "?";
}

std::string monomial_latex(const Monomial& m) {
  std::string out;
  for (const auto& [a, e] : m.factors()) {
    std::string base = atom_latex(a);
    if (e != 1) {
      if (a->kind == AtomKind::Unknown || base.find('_') != std::string::npos) base = "\\left(" + base + "\\right)";
      base += "^{" + std::to_string(e) + "}";
    }
    if (!out.empty()) out += " ";
    out += base;
  }
  return out;
}

std::string rational_latex(const Rational& c) {
  if (c.get_den() == 1) return c.get_num().get_str();
  return "\\frac{" + c.get_num().get_str() + "}{" + c.get_den().get_str() + "}";
}

std::string poly_latex(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : p.terms()) {
    Rational c = t.coeff;
    bool neg = c < 0;
    if (neg) c = -c;
    if (first) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    first = false;
    if (t.monomial.is_one()) {
      out += rational_latex(c);
    } else if (c == 1) {
      out += monomial_latex(t.monomial);
    } else {
      out += rational_latex(c) + " " + monomial_latex(t.monomial);
    }
  }
  return out;
}

}  // namespace

std::string to_latex(const Expression& e) {
  if (e.den().is_one()) return poly_latex(e.num());
  return "\\frac{" + poly_latex(e.num()) + "}{" + poly_latex(e.den()) + "}";
}

}  // namespace hjkit
