#pragma once

#include "hjkit/poly.hpp"

#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hjkit {

/// Immutable symbolic expression: a reduced ratio of two polynomials over Q
/// in atoms (symbols, elementary-function applications, unknown functions
/// and their formal partial derivatives). Two expressions are equal iff
/// their canonical forms are identical.
class Expression {
 public:
  Expression();
  Expression(int value);  // NOLINT(google-explicit-constructor)
  Expression(const Rational& value);  // NOLINT(google-explicit-constructor)
  explicit Expression(Atom atom);

  /// Builds num/den in canonical form. Throws std::domain_error when den = 0.
  static Expression fraction(Polynomial num, Polynomial den);
  static Expression polynomial(Polynomial p);

  const Polynomial& num() const { return node_->num; }
  const Polynomial& den() const { return node_->den; }

  bool is_zero() const { return num().is_zero(); }
  bool is_constant() const { return num().is_constant() && den().is_constant(); }
  bool is_polynomial() const { return den().is_one(); }
  Rational constant_value() const;
  /// The atom when the expression is exactly that atom.
  std::optional<Atom> as_atom() const;

  /// Atoms occurring at the top level (not inside function arguments).
  std::vector<Atom> atoms() const;

  Expression operator-() const;
  Expression operator+(const Expression& o) const;
  Expression operator-(const Expression& o) const;
  Expression operator*(const Expression& o) const;
  Expression operator/(const Expression& o) const;
  Expression& operator+=(const Expression& o) { return *this = *this + o; }
  Expression& operator-=(const Expression& o) { return *this = *this - o; }
  Expression& operator*=(const Expression& o) { return *this = *this * o; }
  Expression pow(int e) const;

  bool operator==(const Expression& o) const;
  bool operator!=(const Expression& o) const { return !(*this == o); }

  /// Infix text; re-parseable with parse_expr.
  std::string str() const;
  /// Canonical identity key (used for interning function atoms).
  std::string key() const;

 private:
  struct Node {
    Polynomial num;
    Polynomial den;
  };
  explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

std::ostream& operator<<(std::ostream& os, const Expression& e);

enum class AtomKind { Symbol, Elementary, Unknown };

enum class SymbolRole { Plain, Base, Jet, Parameter, Momentum };

enum class ElementaryFn { Exp, Ln, Sqrt, Sin, Cos, Tan, Sech, Tanh };

const char* elementary_name(ElementaryFn fn);
std::optional<ElementaryFn> elementary_from_name(std::string_view name);

/// Declaration of an unknown function, e.g. `B(t, x, u)`.
struct UnknownFunction {
  std::string name;
  std::vector<Atom> params;  // symbol atoms naming the argument slots
};

struct AtomData {
  AtomKind kind = AtomKind::Symbol;
  std::string name;

  // Symbol data. For jet coordinates `dep`/`multi` identify u^dep_multi;
  // for momenta `base` is the form slot i; for base variables its index.
  SymbolRole role = SymbolRole::Plain;
  int dep = -1;
  std::vector<int> multi;
  int base = -1;

  // Function data.
  ElementaryFn fn = ElementaryFn::Exp;
  std::vector<Expression> args;
  std::vector<Atom> params;  // unknown: declared slots
  std::vector<int> deriv;    // unknown: derivative count per slot

  std::string key;
  std::vector<Atom> free_symbols;  // symbols reachable from this atom
  bool has_unknown = false;
  bool has_elementary = false;

  bool is_symbol() const { return kind == AtomKind::Symbol; }
  bool args_are_params() const;
  int derivative_order() const;
};

/// Interns a symbol atom. Identical (name, role, tags) yield the same atom.
Atom symbol_atom(const std::string& name, SymbolRole role = SymbolRole::Plain, int dep = -1,
                 std::vector<int> multi = {}, int base = -1);
Expression symbol(const std::string& name);

Expression apply(ElementaryFn fn, const Expression& arg);
/// Unknown function (or one of its formal partial derivatives) applied to args.
Expression apply_unknown(const UnknownFunction& f, std::vector<Expression> args,
                         std::vector<int> deriv = {});
/// Unknown function applied to its declared parameters.
Expression apply_unknown(const UnknownFunction& f);

/// Symbols occurring anywhere in e (including function arguments), sorted.
std::vector<Atom> free_symbols(const Expression& e);
bool contains_unknowns(const Expression& e);
bool contains_elementary(const Expression& e);
bool depends_on(const Expression& e, Atom symbol);

/// Derivation determined by its value on symbols (nullopt means 0) and
/// extended to function atoms by the chain rule.
using SymbolDerivation = std::function<std::optional<Expression>(Atom)>;
Expression apply_derivation(const Expression& e, const SymbolDerivation& on_symbol);

/// Exact partial derivative with respect to a symbol.
Expression differentiate(const Expression& e, Atom s);
Expression differentiate(const Expression& e, const Expression& s);

/// Simultaneous substitution of symbols.
using Bindings = std::map<Atom, Expression, AtomLess>;
Expression substitute(const Expression& e, const Bindings& bindings);

/// Replaces an unknown function by `body`, written in the function's declared
/// parameters; formal derivatives become derivatives of `body`.
Expression substitute_unknown(const Expression& e, const UnknownFunction& f, const Expression& body);

/// Bottom-up atom rewrite. `on_symbol` maps symbols; `on_function` sees each
/// function atom after its arguments were rewritten. nullopt keeps the atom.
struct AtomRewriter {
  std::function<std::optional<Expression>(Atom)> on_symbol;
  std::function<std::optional<Expression>(Atom)> on_function;
};
Expression rewrite_atoms(const Expression& e, const AtomRewriter& rw);

/// Solves e = 0 for the atom `a` when e is affine in it, i.e. e = c1*a + c0
/// with c0, c1 free of `a` (and, for unknown functions, of all its formal
/// derivatives). Returns -c0/c1, or nullopt otherwise.
std::optional<Expression> solve_linear(const Expression& e, Atom a);

/// All distinct atoms reachable from e (top level and inside arguments).
std::vector<Atom> all_atoms(const Expression& e);

std::string atom_text(Atom a);
std::string to_latex(const Expression& e);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : std::runtime_error(message + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class UndeclaredSymbol : public std::runtime_error {
 public:
  explicit UndeclaredSymbol(const std::string& name)
      : std::runtime_error("undeclared symbol '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

}  // namespace hjkit
