#include "hjkit/problem.hpp"

#include <fstream>
#include <sstream>

namespace hjkit {

namespace {

struct Entry {
  std::string text;
  SourceLoc at;
};

struct RawBlock {
  std::string kind, name;
  SourceLoc at;
  std::vector<Entry> entries;
};

class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  std::vector<RawBlock> blocks() {
    std::vector<RawBlock> out;
    while (true) {
      skip_space(true);
      if (done()) break;
      RawBlock b;
      b.at = loc();
      b.kind = identifier("block kind");
      skip_space(false);
      b.name = identifier("block name");
      skip_space(false);
      if (done() || text_[pos_] != '{') fail("expected '{'");
      advance();
      read_entries(b);
      out.push_back(std::move(b));
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ProblemError(loc(), msg); }
  bool done() const { return pos_ >= text_.size(); }
  SourceLoc loc() const { return {line_, col_}; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_comment() {
    while (!done() && text_[pos_] != '\n') advance();
  }

  void skip_space(bool newlines) {
    while (!done()) {
      char c = text_[pos_];
      if (c == '#') {
        skip_comment();
      } else if (c == ' ' || c == '\t' || c == '\r' || (newlines && c == '\n')) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string identifier(const char* what) {
    std::size_t start = pos_;
    while (!done() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) advance();
    if (start == pos_) fail(std::string("expected ") + what);
    return std::string(text_.substr(start, pos_ - start));
  }

  void read_entries(RawBlock& b) {
    while (true) {
      skip_space(true);
      if (done()) throw ProblemError(b.at, "unterminated block '" + b.name + "'");
      char c = text_[pos_];
      if (c == '}') {
        advance();
        return;
      }
      if (c == ';') {
        advance();
        continue;
      }
      Entry e{"", loc()};
      int depth = 0;
      while (!done()) {
        c = text_[pos_];
        if (c == '#') {
          skip_comment();
          continue;
        }
        if (depth == 0 && (c == ';' || c == '\n' || c == '}')) break;
        if (c == '(') ++depth;
        if (c == ')') --depth;
        e.text += c;
        advance();
      }
      while (!e.text.empty() && std::isspace(static_cast<unsigned char>(e.text.back()))) e.text.pop_back();
      if (!e.text.empty()) b.entries.push_back(std::move(e));
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

SourceLoc offset_loc(const Entry& e, std::size_t offset) {
  SourceLoc at = e.at;
  for (std::size_t i = 0; i < offset && i < e.text.size(); ++i) {
    if (e.text[i] == '\n') {
      ++at.line;
      at.column = 1;
    } else {
      ++at.column;
    }
  }
  return at;
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

// Keyword entry "kw rest": returns rest when the entry starts with kw.
std::optional<std::string> keyword(const Entry& e, std::string_view kw) {
  if (e.text.size() <= kw.size() || e.text.compare(0, kw.size(), kw) != 0) return std::nullopt;
  if (!std::isspace(static_cast<unsigned char>(e.text[kw.size()]))) return std::nullopt;
  return trim(std::string_view(e.text).substr(kw.size()));
}

struct Assignment {
  std::string lhs;
  std::string rhs;
  std::size_t rhs_offset;
};

Assignment split_assignment(const Entry& e) {
  auto eq = e.text.find('=');
  if (eq == std::string::npos) throw ProblemError(e.at, "expected 'name = expression'");
  Assignment a{trim(std::string_view(e.text).substr(0, eq)), std::string(e.text.substr(eq + 1)), eq + 1};
  if (a.lhs.empty()) throw ProblemError(e.at, "missing left-hand side");
  return a;
}

class Builder {
 public:
  explicit Builder(int order_cap) : cap_override_(order_cap) {}

  ProblemFile build(std::vector<RawBlock> raw) {
    if (raw.empty()) throw ProblemError({1, 1}, "empty problem file");
    if (raw[0].kind != "bundle") throw ProblemError(raw[0].at, "the first block must be a bundle");
    bundle_block(raw[0]);
    for (std::size_t i = 1; i < raw.size(); ++i) {
      const RawBlock& b = raw[i];
      claim(b);
      if (b.kind == "equation") {
        equation(b);
      } else if (b.kind == "connection") {
        connection(b);
      } else if (b.kind == "lagrangian") {
        lagrangian(b);
      } else if (b.kind == "momenta") {
        momenta(b);
      } else if (b.kind == "lie_field") {
        lie_field(b);
      } else if (b.kind == "solution") {
        solution(b);
      } else if (b.kind == "params") {
        params(b);
      } else if (b.kind == "bundle") {
        throw ProblemError(b.at, "only one bundle block is allowed");
      } else {
        throw ProblemError(b.at, "unknown block kind '" + b.kind + "'");
      }
    }
    return std::move(p_);
  }

 private:
  void claim(const RawBlock& b) {
    auto [it, fresh] = names_.emplace(b.kind + "\x1f" + b.name, b.at);
    if (!fresh)
      throw ProblemError(b.at, "duplicate " + b.kind + " '" + b.name + "' (first defined at " + it->second.str() + ")");
  }

  Expression expr(const Entry& e, const std::string& text, std::size_t offset) const {
    try {
      return bundle_->parse(text);
    } catch (const ParseError& err) {
      std::string msg = err.what();
      msg = msg.substr(0, msg.rfind(" at offset"));
      throw ProblemError(offset_loc(e, offset + err.offset()), msg);
    } catch (const UndeclaredSymbol& err) {
      auto at = text.find(err.name());
      throw ProblemError(offset_loc(e, offset + (at == std::string::npos ? 0 : at)),
                         "unresolved reference '" + err.name() + "'");
    } catch (const std::domain_error& err) {
      throw ProblemError(offset_loc(e, offset), err.what());
    }
  }

  Atom lhs_atom(const Entry& e, const std::string& name) const {
    auto s = bundle_->symbol(name);
    if (!s || !s->as_atom()) throw ProblemError(e.at, "unresolved reference '" + name + "'");
    return *s->as_atom();
  }

  Atom jet_lhs(const Entry& e, const std::string& name) const {
    Atom a = lhs_atom(e, name);
    if (!bundle_->is_jet(a)) throw ProblemError(e.at, "'" + name + "' is not a jet coordinate");
    return a;
  }

  void bundle_block(const RawBlock& b) {
    p_.bundle_name = b.name;
    p_.bundle_at = b.at;
    std::vector<std::string> base, deps, params;
    std::vector<std::pair<Entry, std::string>> unknowns;
    int cap = 12;
    for (const Entry& e : b.entries) {
      if (auto r = keyword(e, "base")) {
        base = split_list(*r);
      } else if (auto r2 = keyword(e, "dependent")) {
        deps = split_list(*r2);
      } else if (auto r3 = keyword(e, "params")) {
        params = split_list(*r3);
      } else if (auto r4 = keyword(e, "unknown")) {
        unknowns.emplace_back(e, *r4);
      } else if (auto r5 = keyword(e, "order_cap")) {
        try {
          cap = std::stoi(*r5);
        } catch (const std::exception&) {
          throw ProblemError(e.at, "order_cap expects an integer");
        }
      } else {
        throw ProblemError(e.at, "unknown bundle entry '" + e.text + "'");
      }
    }
    std::shared_ptr<Bundle> bundle;
    try {
      bundle = std::make_shared<Bundle>(base, deps, params);
    } catch (const std::invalid_argument& err) {
      throw ProblemError(b.at, err.what());
    }
    bundle->set_order_cap(cap_override_ > 0 ? cap_override_ : cap);
    for (const auto& [e, decl] : unknowns) {
      auto open = decl.find('(');
      auto close = decl.rfind(')');
      if (open == std::string::npos || close == std::string::npos || close < open)
        throw ProblemError(e.at, "expected 'unknown Name(arg, ...)'");
      try {
        bundle->declare_unknown(trim(decl.substr(0, open)), split_list(decl.substr(open + 1, close - open - 1)));
      } catch (const UndeclaredSymbol& err) {
        throw ProblemError(e.at, "unresolved reference '" + err.name() + "'");
      } catch (const std::invalid_argument& err) {
        throw ProblemError(e.at, err.what());
      }
    }
    bundle_ = bundle;
    p_.bundle = bundle;
  }

  void equation(const RawBlock& b) {
    EquationBlock eq{b.name, b.at, {}};
    for (const Entry& e : b.entries) {
      auto a = split_assignment(e);
      Atom lead = jet_lhs(e, a.lhs);
      for (const Rule& r : eq.rules)
        if (r.alpha == lead->dep && r.K == lead->multi) throw ProblemError(e.at, "duplicate rule for " + lead->name);
      eq.rules.push_back({lead->dep, lead->multi, expr(e, a.rhs, a.rhs_offset)});
    }
    try {
      SolvedPde check(bundle_, eq.rules);
    } catch (const std::invalid_argument& err) {
      throw ProblemError(b.at, err.what());
    }
    p_.equations.push_back(std::move(eq));
  }

  void connection(const RawBlock& b) {
    ConnectionBlock c{b.name, b.at, -1, {}};
    for (const Entry& e : b.entries)
      if (auto r = keyword(e, "order")) {
        try {
          c.order = std::stoi(*r);
        } catch (const std::exception&) {
          throw ProblemError(e.at, "order expects an integer");
        }
        if (c.order < 0) throw ProblemError(e.at, "order must be non-negative");
      }
    for (const Entry& e : b.entries) {
      if (keyword(e, "order")) continue;
      auto a = split_assignment(e);
      Atom lead = jet_lhs(e, a.lhs);
      int o = hjkit::order(lead->multi);
      if (c.order < 0) c.order = o - 1;
      if (o != c.order + 1)
        throw ProblemError(e.at, "order mismatch: " + lead->name + " is not a coefficient slot of an order-" +
                                     std::to_string(c.order) + " connection");
      Expression v = expr(e, a.rhs, a.rhs_offset);
      if (bundle_->jet_order(v) > c.order)
        throw ProblemError(offset_loc(e, a.rhs_offset), "order mismatch: coefficient of " + lead->name +
                                                            " has jet order " + std::to_string(bundle_->jet_order(v)) +
                                                            " > " + std::to_string(c.order));
      if (!c.coefficients.emplace(std::make_pair(lead->dep, lead->multi), v).second)
        throw ProblemError(e.at, "duplicate coefficient " + lead->name);
    }
    if (c.order < 0) throw ProblemError(b.at, "connection has no coefficients");
    try {
      HolonomicConnection check(bundle_, c.order, c.coefficients);
    } catch (const std::exception& err) {
      throw ProblemError(b.at, err.what());
    }
    p_.connections.push_back(std::move(c));
  }

  void lagrangian(const RawBlock& b) {
    LagrangianBlock l{b.name, b.at, Expression(), -1, {}};
    bool have = false;
    for (const Entry& e : b.entries) {
      if (auto r = keyword(e, "order")) {
        try {
          l.order = std::stoi(*r);
        } catch (const std::exception&) {
          throw ProblemError(e.at, "order expects an integer");
        }
      } else if (auto r2 = keyword(e, "solve_for")) {
        l.solve_for = split_list(*r2);
        for (const auto& s : l.solve_for) jet_lhs(e, s);
        if (static_cast<int>(l.solve_for.size()) != bundle_->m())
          throw ProblemError(e.at, "solve_for needs one jet variable per dependent variable");
      } else {
        auto a = split_assignment(e);
        if (a.lhs != "L") throw ProblemError(e.at, "expected 'L = density'");
        if (have) throw ProblemError(e.at, "duplicate density");
        l.density = expr(e, a.rhs, a.rhs_offset);
        have = true;
      }
    }
    if (!have) throw ProblemError(b.at, "lagrangian block needs 'L = ...'");
    try {
      Lagrangian{bundle_, l.density, l.order}.top_order();
    } catch (const std::exception& err) {
      throw ProblemError(b.at, std::string("order mismatch: ") + err.what());
    }
    p_.lagrangians.push_back(std::move(l));
  }

  void momenta(const RawBlock& b) {
    MomentaBlock m{b.name, b.at, {}};
    for (const Entry& e : b.entries) {
      auto a = split_assignment(e);
      Atom p = lhs_atom(e, a.lhs);
      if (p->role != SymbolRole::Momentum) throw ProblemError(e.at, "'" + a.lhs + "' is not a momentum coordinate");
      if (!m.values.emplace(MomentumKey{p->dep, p->multi, p->base}, expr(e, a.rhs, a.rhs_offset)).second)
        throw ProblemError(e.at, "duplicate momentum " + a.lhs);
    }
    p_.momenta.push_back(std::move(m));
  }

  void lie_field(const RawBlock& b) {
    LieFieldBlock l{b.name, b.at, {std::vector<Expression>(static_cast<std::size_t>(bundle_->n())),
                                   std::vector<Expression>(static_cast<std::size_t>(bundle_->m()))}};
    for (const Entry& e : b.entries) {
      auto a = split_assignment(e);
      Expression v = expr(e, a.rhs, a.rhs_offset);
      if (bundle_->jet_order(v) > 0) throw ProblemError(e.at, "order mismatch: Lie point field components live on E");
      if (auto i = bundle_->base_index(a.lhs)) {
        l.field.X[static_cast<std::size_t>(*i)] = v;
      } else if (auto al = bundle_->dependent_index(a.lhs)) {
        l.field.Y[static_cast<std::size_t>(*al)] = v;
      } else {
        throw ProblemError(e.at, "unresolved reference '" + a.lhs + "'");
      }
    }
    p_.lie_fields.push_back(std::move(l));
  }

  void solution(const RawBlock& b) {
    SolutionBlock s{b.name, b.at, ClosedForm(static_cast<std::size_t>(bundle_->m()))};
    std::vector<bool> set(static_cast<std::size_t>(bundle_->m()), false);
    for (const Entry& e : b.entries) {
      auto a = split_assignment(e);
      auto al = bundle_->dependent_index(a.lhs);
      if (!al) throw ProblemError(e.at, "'" + a.lhs + "' is not a dependent variable");
      Expression v = expr(e, a.rhs, a.rhs_offset);
      if (bundle_->jet_order(v) >= 0) throw ProblemError(e.at, "a closed-form solution may not mention jet coordinates");
      s.u[static_cast<std::size_t>(*al)] = v;
      set[static_cast<std::size_t>(*al)] = true;
    }
    for (std::size_t a = 0; a < set.size(); ++a)
      if (!set[a]) throw ProblemError(b.at, "solution misses " + bundle_->dependent_names()[a]);
    p_.solutions.push_back(std::move(s));
  }

  void params(const RawBlock& b) {
    ParamsBlock pb{b.name, b.at, {}};
    for (const Entry& e : b.entries) {
      auto a = split_assignment(e);
      auto sym = bundle_->symbol(a.lhs);
      if (!sym || !sym->as_atom() || (*sym->as_atom())->role != SymbolRole::Parameter)
        throw ProblemError(e.at, "'" + a.lhs + "' is not a declared parameter");
      Expression v = expr(e, a.rhs, a.rhs_offset);
      if (!v.is_constant()) throw ProblemError(offset_loc(e, a.rhs_offset), "parameter value must be a number");
      pb.values.emplace_back(a.lhs, v.constant_value());
    }
    p_.params.push_back(std::move(pb));
  }

  int cap_override_;
  ProblemFile p_;
  std::shared_ptr<const Bundle> bundle_;
  std::map<std::string, SourceLoc> names_;
};

template <typename T>
const T& find_block(const std::vector<T>& blocks, const std::string& name, const char* kind) {
  if (blocks.empty()) throw std::invalid_argument(std::string("problem has no ") + kind + " block");
  if (name.empty()) return blocks.front();
  for (const T& b : blocks)
    if (b.name == name) return b;
  throw std::invalid_argument(std::string("no ") + kind + " named '" + name + "'");
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
  return s;
}

std::string rational_text(const Rational& r) { return r.get_str(); }

}  // namespace

const EquationBlock& ProblemFile::equation(const std::string& n) const { return find_block(equations, n, "equation"); }
const ConnectionBlock& ProblemFile::connection(const std::string& n) const {
  return find_block(connections, n, "connection");
}
const LagrangianBlock& ProblemFile::lagrangian(const std::string& n) const {
  return find_block(lagrangians, n, "lagrangian");
}
const MomentaBlock& ProblemFile::momenta_block(const std::string& n) const { return find_block(momenta, n, "momenta"); }
const LieFieldBlock& ProblemFile::lie_field(const std::string& n) const { return find_block(lie_fields, n, "lie_field"); }
const SolutionBlock& ProblemFile::solution(const std::string& n) const { return find_block(solutions, n, "solution"); }

std::map<std::string, Rational> ProblemFile::parameter_values() const {
  std::map<std::string, Rational> out;
  for (const auto& b : params)
    for (const auto& [k, v] : b.values) out[k] = v;
  return out;
}

ProblemFile parse_problem(std::string_view text, int order_cap) {
  Scanner sc(text);
  return Builder(order_cap).build(sc.blocks());
}

ProblemFile bind_parameters(const ProblemFile& p, const std::map<std::string, Rational>& values) {
  Bindings bind;
  for (const auto& [name, v] : values) {
    auto s = p.bundle->symbol(name);
    if (!s || !s->as_atom() || (*s->as_atom())->role != SymbolRole::Parameter)
      throw std::invalid_argument("'" + name + "' is not a declared parameter");
    bind[*s->as_atom()] = Expression(v);
  }
  auto sub = [&](const Expression& e) { return substitute(e, bind); };
  ProblemFile out = p;
  for (auto& e : out.equations)
    for (auto& r : e.rules) r.rhs = sub(r.rhs);
  for (auto& c : out.connections)
    for (auto& [k, v] : c.coefficients) v = sub(v);
  for (auto& l : out.lagrangians) l.density = sub(l.density);
  for (auto& m : out.momenta)
    for (auto& [k, v] : m.values) v = sub(v);
  for (auto& l : out.lie_fields) {
    for (auto& v : l.field.X) v = sub(v);
    for (auto& v : l.field.Y) v = sub(v);
  }
  for (auto& s : out.solutions)
    for (auto& v : s.u) v = sub(v);
  return out;
}

ProblemFile load_problem(const std::string& path, int order_cap) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str(), order_cap);
}

std::string render_problem(const ProblemFile& p) {
  const Bundle& b = *p.bundle;
  std::ostringstream os;
  os << "bundle " << p.bundle_name << " {\n  base " << join(b.base_names()) << "\n  dependent "
     << join(b.dependent_names()) << "\n";
  if (!b.param_names().empty()) os << "  params " << join(b.param_names()) << "\n";
  for (const auto& [name, f] : b.unknowns()) {
    std::vector<std::string> args;
    for (Atom a : f.params) args.push_back(a->name);
    os << "  unknown " << name << "(" << join(args) << ")\n";
  }
  if (b.order_cap() != 12) os << "  order_cap " << b.order_cap() << "\n";
  os << "}\n";
  for (const auto& pb : p.params) {
    os << "\nparams " << pb.name << " {\n";
    for (const auto& [k, v] : pb.values) os << "  " << k << " = " << rational_text(v) << "\n";
    os << "}\n";
  }
  for (const auto& e : p.equations) {
    os << "\nequation " << e.name << " {\n";
    for (const Rule& r : e.rules) os << "  " << b.jet_name(r.alpha, r.K) << " = " << r.rhs.str() << "\n";
    os << "}\n";
  }
  for (const auto& c : p.connections) {
    os << "\nconnection " << c.name << " {\n  order " << c.order << "\n";
    for (const auto& [key, v] : c.coefficients) os << "  " << b.jet_name(key.first, key.second) << " = " << v.str() << "\n";
    os << "}\n";
  }
  for (const auto& l : p.lagrangians) {
    os << "\nlagrangian " << l.name << " {\n  L = " << l.density.str() << "\n";
    if (l.order >= 0) os << "  order " << l.order << "\n";
    if (!l.solve_for.empty()) os << "  solve_for " << join(l.solve_for) << "\n";
    os << "}\n";
  }
  for (const auto& m : p.momenta) {
    os << "\nmomenta " << m.name << " {\n";
    for (const auto& [key, v] : m.values) os << "  " << momentum_label(b, key) << " = " << v.str() << "\n";
    os << "}\n";
  }
  for (const auto& l : p.lie_fields) {
    os << "\nlie_field " << l.name << " {\n";
    for (int i = 0; i < b.n(); ++i)
      os << "  " << b.base_names()[static_cast<std::size_t>(i)] << " = " << l.field.X[static_cast<std::size_t>(i)].str()
         << "\n";
    for (int a = 0; a < b.m(); ++a)
      os << "  " << b.dependent_names()[static_cast<std::size_t>(a)] << " = "
         << l.field.Y[static_cast<std::size_t>(a)].str() << "\n";
    os << "}\n";
  }
  for (const auto& s : p.solutions) {
    os << "\nsolution " << s.name << " {\n";
    for (int a = 0; a < b.m(); ++a)
      os << "  " << b.dependent_names()[static_cast<std::size_t>(a)] << " = " << s.u[static_cast<std::size_t>(a)].str()
         << "\n";
    os << "}\n";
  }
  return os.str();
}

}  // namespace hjkit
