#include "hjkit/parser.hpp"

#include <cctype>

namespace hjkit {

Expression SimpleResolver::add_symbol(const std::string& name, SymbolRole role) {
  Expression e(symbol_atom(name, role));
  symbols_[name] = e;
  return e;
}

const UnknownFunction& SimpleResolver::add_unknown(const std::string& name, const std::vector<std::string>& params) {
  UnknownFunction f{name, {}};
  for (const auto& p : params) {
    auto s = symbol(p);
    if (!s || !s->as_atom()) throw UndeclaredSymbol(p);
    f.params.push_back(*s->as_atom());
  }
  return unknowns_[name] = std::move(f);
}

std::optional<Expression> SimpleResolver::symbol(std::string_view name) const {
  auto it = symbols_.find(name);
  if (it == symbols_.end()) return std::nullopt;
  return it->second;
}

const UnknownFunction* SimpleResolver::unknown(std::string_view name) const {
  auto it = unknowns_.find(name);
  return it == unknowns_.end() ? nullptr : &it->second;
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, const SymbolResolver& ctx) : text_(text), ctx_(ctx) {}

  Expression parse() {
    Expression e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, "syntax error: " + msg); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expression expr() {
    Expression e = term();
    while (true) {
      if (accept('+')) {
        e = e + term();
      } else if (accept('-')) {
        e = e - term();
      } else {
        return e;
      }
    }
  }

  Expression term() {
    Expression e = unary();
    while (true) {
      if (accept('*')) {
        e = e * unary();
      } else if (accept('/')) {
        std::size_t at = pos_;
        Expression d = unary();
        if (d.is_zero()) throw ParseError(at, "division by zero");
        e = e / d;
      } else {
        skip_ws();
        if (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '('))
          fail("implicit multiplication is not allowed");
        return e;
      }
    }
  }

  Expression unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  int integer_exponent() {
    bool neg = false;
    bool paren = accept('(');
    if (accept('-')) neg = true;
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("exponent must be an integer");
    if (pos_ < text_.size() && text_[pos_] == '.') fail("exponent must be an integer");
    int v = std::stoi(std::string(text_.substr(start, pos_ - start)));
    if (paren) expect(')');
    return neg ? -v : v;
  }

  Expression power() {
    Expression base = primary();
    if (accept('^')) {
      std::size_t at = pos_;
      int e = integer_exponent();
      if (e < 0 && base.is_zero()) throw ParseError(at, "division by zero");
      return base.pow(e);
    }
    return base;
  }

  Expression number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string digits(text_.substr(start, pos_ - start));
    int scale = 0;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      std::size_t fstart = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      digits += std::string(text_.substr(fstart, pos_ - fstart));
      scale = static_cast<int>(pos_ - fstart);
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      bool neg = false;
      if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) neg = text_[pos_++] == '-';
      std::size_t estart = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (estart == pos_) {
        pos_ = save;
      } else {
        int ex = std::stoi(std::string(text_.substr(estart, pos_ - estart)));
        scale += neg ? ex : -ex;
      }
    }
    if (digits.empty()) fail("malformed number");
    Integer n(digits, 10);
    Integer p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
    Rational value = scale >= 0 ? Rational(n, p) : Rational(n * p);
    value.canonicalize();
    return value;
  }

  std::vector<Expression> call_args() {
    std::vector<Expression> args;
    expect('(');
    if (accept(')')) return args;
    args.push_back(expr());
    while (accept(',')) args.push_back(expr());
    expect(')');
    return args;
  }

  // Splits a derivative suffix into parameter slots by greedy longest match.
  std::optional<std::vector<int>> split_slots(const UnknownFunction& f, std::string_view suffix) const {
    std::vector<int> deriv(f.params.size(), 0);
    std::size_t at = 0;
    while (at < suffix.size()) {
      int best = -1;
      std::size_t best_len = 0;
      for (std::size_t j = 0; j < f.params.size(); ++j) {
        const std::string& n = f.params[j]->name;
        if (n.size() > best_len && suffix.substr(at, n.size()) == n) best = static_cast<int>(j), best_len = n.size();
      }
      if (best < 0) return std::nullopt;
      ++deriv[best];
      at += best_len;
    }
    return deriv;
  }

  Expression primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expression e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (!(std::isalpha(static_cast<unsigned char>(c)))) fail("unexpected '" + std::string(1, c) + "'");
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string_view name = text_.substr(start, pos_ - start);

    if (auto fn = elementary_from_name(name); fn && peek('(')) {
      std::size_t at = pos_;
      auto args = call_args();
      if (args.size() != 1) throw ParseError(at, std::string(name) + " takes one argument");
      try {
        return apply(*fn, args[0]);
      } catch (const std::domain_error& e) {
        throw ParseError(at, e.what());
      }
    }
    if (auto s = ctx_.symbol(name)) {
      if (peek('(')) fail("symbol '" + std::string(name) + "' is not a function");
      return *s;
    }
    const UnknownFunction* f = ctx_.unknown(name);
    std::vector<int> deriv;
    if (!f) {
      auto us = name.find('_');
      if (us != std::string_view::npos) {
        f = ctx_.unknown(name.substr(0, us));
        if (f) {
          auto d = split_slots(*f, name.substr(us + 1));
          if (!d) throw UndeclaredSymbol(std::string(name));
          deriv = std::move(*d);
        }
      }
    }
    if (!f) throw UndeclaredSymbol(std::string(name));
    if (peek('(')) {
      std::size_t at = pos_;
      auto args = call_args();
      if (args.size() != f->params.size())
        throw ParseError(at, f->name + " expects " + std::to_string(f->params.size()) + " arguments");
      return apply_unknown(*f, std::move(args), deriv);
    }
    std::vector<Expression> args;
    for (Atom p : f->params) args.emplace_back(p);
    return apply_unknown(*f, std::move(args), deriv);
  }

  std::string_view text_;
  const SymbolResolver& ctx_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression parse_expr(std::string_view text, const SymbolResolver& ctx) {
  Parser p(text, ctx);
  return p.parse();
}

}  // namespace hjkit
