#pragma once

#include "hjkit/expr.hpp"

#include <map>
#include <string>
#include <string_view>

namespace hjkit {

/// Name resolution for the expression grammar.
class SymbolResolver {
 public:
  virtual ~SymbolResolver() = default;
  virtual std::optional<Expression> symbol(std::string_view name) const = 0;
  virtual const UnknownFunction* unknown(std::string_view name) const = 0;
};

/// Resolver over explicitly registered names.
class SimpleResolver : public SymbolResolver {
 public:
  Expression add_symbol(const std::string& name, SymbolRole role = SymbolRole::Plain);
  void add(const std::string& name, const Expression& value) { symbols_[name] = value; }
  const UnknownFunction& add_unknown(const std::string& name, const std::vector<std::string>& params);

  std::optional<Expression> symbol(std::string_view name) const override;
  const UnknownFunction* unknown(std::string_view name) const override;

 private:
  std::map<std::string, Expression, std::less<>> symbols_;
  std::map<std::string, UnknownFunction, std::less<>> unknowns_;
};

/// Parses an infix expression. Grammar:
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | '+' unary | power
///   power   := primary ('^' integer | '^' '(' ['-'] integer ')' | '^' '-' integer)?
///   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
/// Juxtaposition is rejected. Unknown-function derivatives are written
/// `B_xu` (slot names concatenated); a bare unknown name means the function
/// at its declared arguments.
Expression parse_expr(std::string_view text, const SymbolResolver& ctx);

}  // namespace hjkit
