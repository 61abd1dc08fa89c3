#include "hjkit/variational.hpp"

namespace hjkit {

namespace {

Expression partial(const Lagrangian& lg, int alpha, const MultiIndex& I) {
  return differentiate(lg.density, lg.b().jet(alpha, I));
}

Expression sign(int k) { return k % 2 == 0 ? Expression(1) : Expression(-1); }

Expression momentum_value(const MomentumSection& t, int alpha, const MultiIndex& I, int i) {
  auto it = t.find({alpha, I, i});
  return it == t.end() ? Expression(0) : it->second;
}

}  // namespace

int Lagrangian::top_order() const {
  int jo = bundle->jet_order(density);
  if (order >= 0) {
    if (jo > order) throw OrderError("Lagrangian density has jet order " + std::to_string(jo) + " > declared " +
                                     std::to_string(order));
    if (order < 1) throw std::invalid_argument("Lagrangian order must be at least 1");
    return order;
  }
  return std::max(1, jo);
}

std::string momentum_label(const Bundle& b, const MomentumKey& key) {
  const auto& [alpha, I, i] = key;
  return b.momentum_name(alpha, I, i);
}

std::vector<Expression> euler_lagrange(const Lagrangian& lg) {
  const Bundle& b = lg.b();
  const int top = lg.top_order();
  std::vector<Expression> out;
  for (int alpha = 0; alpha < b.m(); ++alpha) {
    Expression e;
    for (const auto& I : multi_indices_up_to(b.n(), top)) {
      Expression d = partial(lg, alpha, I);
      if (!d.is_zero()) e += sign(order(I)) * total_derivative(b, d, I);
    }
    out.push_back(e);
  }
  return out;
}

MomentumSection legendre_local(const Lagrangian& lg) {
  const Bundle& b = lg.b();
  const int top = lg.top_order();
  MomentumSection t;
  for (int alpha = 0; alpha < b.m(); ++alpha)
    for (const auto& I : multi_indices_up_to(b.n(), top - 1))
      for (int i = 0; i < b.n(); ++i) {
        MultiIndex K = plus(I, i);
        Expression sum;
        for (const auto& J : multi_indices_up_to(b.n(), top - order(K))) {
          Expression d = partial(lg, alpha, plus(K, J));
          if (d.is_zero()) continue;
          Rational w(multinomial(K, J), binomial(order(K) + order(J), order(J)));
          w.canonicalize();
          sum += sign(order(J)) * Expression(w) * total_derivative(b, d, J);
        }
        Rational weight(I[static_cast<std::size_t>(i)] + 1, order(I) + 1);
        weight.canonicalize();
        t[{alpha, I, i}] = Expression(weight) * sum;
      }
  return t;
}

LabeledExpressions first_variation_defect(const Lagrangian& lg, const MomentumSection& t) {
  const Bundle& b = lg.b();
  const int top = lg.top_order();
  auto el = euler_lagrange(lg);
  LabeledExpressions out;
  for (int alpha = 0; alpha < b.m(); ++alpha)
    for (const auto& I : multi_indices_up_to(b.n(), top)) {
      Expression d = -partial(lg, alpha, I);
      if (order(I) == 0) d += el[static_cast<std::size_t>(alpha)];
      for (int i = 0; i < b.n(); ++i) {
        if (order(I) < top) d += total_derivative(b, momentum_value(t, alpha, I, i), i);
        if (I[static_cast<std::size_t>(i)] > 0) d += momentum_value(t, alpha, minus(I, i), i);
      }
      out.emplace_back(b.jet_name(alpha, I), d);
    }
  return out;
}

Expression hamiltonian_density(const Lagrangian& lg) {
  const Bundle& b = lg.b();
  const int top = lg.top_order();
  Expression e = -lg.density;
  for (int alpha = 0; alpha < b.m(); ++alpha)
    for (const auto& I : multi_indices_up_to(b.n(), top - 1))
      for (int i = 0; i < b.n(); ++i) e += b.u(alpha, plus(I, i)) * Expression(b.momentum(alpha, I, i));
  return e;
}

Expression reduce_hamiltonian(const Lagrangian& lg, const MomentumSection& t) {
  Bindings bind;
  for (const auto& [key, value] : t) {
    const auto& [alpha, I, i] = key;
    bind[lg.b().momentum(alpha, I, i)] = value;
  }
  return substitute(hamiltonian_density(lg), bind);
}

LabeledExpressions constraint_equations(const Lagrangian& lg) {
  const Bundle& b = lg.b();
  const int top = lg.top_order();
  LabeledExpressions out;
  for (int alpha = 0; alpha < b.m(); ++alpha)
    for (const auto& K : multi_indices_of_order(b.n(), top)) {
      Expression e = -partial(lg, alpha, K);
      for (int i = 0; i < b.n(); ++i)
        if (K[static_cast<std::size_t>(i)] > 0) e += Expression(b.momentum(alpha, minus(K, i), i));
      out.emplace_back(b.jet_name(alpha, K), e);
    }
  return out;
}

ElhSystem elh_system(const Lagrangian& lg) {
  const Bundle& b = lg.b();
  const int k = lg.top_order() - 1;
  ElhSystem sys;
  for (auto& [label, e] : constraint_equations(lg)) sys.constraints.push_back({label, "0", e});
  for (int alpha = 0; alpha < b.m(); ++alpha)
    for (const auto& I : multi_indices_up_to(b.n(), k)) {
      std::string lhs;
      Expression rhs = partial(lg, alpha, I);
      for (int i = 0; i < b.n(); ++i) {
        if (!lhs.empty()) lhs += " + ";
        lhs += "d_" + b.base_names()[static_cast<std::size_t>(i)] + " " + b.momentum_name(alpha, I, i);
        if (I[static_cast<std::size_t>(i)] > 0) rhs -= Expression(b.momentum(alpha, minus(I, i), i));
      }
      sys.dynamics.push_back({b.jet_name(alpha, I), lhs, rhs});
    }
  for (int alpha = 0; alpha < b.m(); ++alpha)
    for (const auto& J : multi_indices_up_to(b.n(), k))
      for (int i = 0; i < b.n(); ++i)
        sys.kinematics.push_back({b.jet_name(alpha, J) + "," + b.base_names()[static_cast<std::size_t>(i)],
                                  "d_" + b.base_names()[static_cast<std::size_t>(i)] + " " + b.jet_name(alpha, J),
                                  b.u(alpha, plus(J, i))});
  return sys;
}

SolvedPde euler_lagrange_system(const Lagrangian& lg, const std::vector<std::string>& solve_for) {
  const Bundle& b = lg.b();
  auto el = euler_lagrange(lg);
  if (!solve_for.empty() && static_cast<int>(solve_for.size()) != b.m())
    throw std::invalid_argument("solve_for needs one entry per dependent variable");
  std::vector<Rule> rules;
  for (int alpha = 0; alpha < b.m(); ++alpha) {
    const Expression& e = el[static_cast<std::size_t>(alpha)];
    std::optional<Atom> target;
    std::optional<Expression> value;
    if (!solve_for.empty() && !solve_for[static_cast<std::size_t>(alpha)].empty()) {
      const std::string& name = solve_for[static_cast<std::size_t>(alpha)];
      auto s = b.symbol(name);
      if (!s || !s->as_atom() || !b.is_jet(*s->as_atom())) throw UndeclaredSymbol(name);
      target = *s->as_atom();
      value = solve_linear(e, *target);
      if (!value) throw std::invalid_argument("Euler-Lagrange expression is not affine in " + name);
    } else {
      int best = 0;
      for (Atom a : free_symbols(e)) {
        if (!b.is_jet(a) || order(a->multi) <= best) continue;
        auto v = solve_linear(e, a);
        auto c = e.num().coefficients_in(a);
        if (!v || c.size() != 2 || !c[1].is_constant()) continue;
        best = order(a->multi), target = a, value = v;
      }
      if (!target) throw std::invalid_argument("no solvable leading variable in Euler-Lagrange expression " +
                                               std::to_string(alpha));
    }
    rules.push_back({(*target)->dep, (*target)->multi, *value});
  }
  return SolvedPde(lg.bundle, std::move(rules));
}

MomentumSection pullback_momenta(const HolonomicConnection& c, const MomentumSection& t, const FlatnessWitness& flat) {
  MomentumSection out;
  for (const auto& [key, value] : t) out[key] = pullback_prolongation(c, value, flat);
  return out;
}

bool GeneralizedHjReport::passed() const {
  return flatness.passed() && constraints.passed() && field_equations.passed() &&
         (!el_cross_check || el_cross_check->passed());
}

GeneralizedHjReport check_generalized_hj(const Lagrangian& lg, const HolonomicConnection& c,
                                         const MomentumSection& t, const ZeroTestPolicy& policy,
                                         const std::vector<std::string>& solve_for) {
  const Bundle& b = lg.b();
  const int k = lg.top_order() - 1;
  if (c.order() != k)
    throw std::invalid_argument("connection order " + std::to_string(c.order()) + " does not match Lagrangian order " +
                                std::to_string(k + 1));
  GeneralizedHjReport rep;
  rep.flatness = is_flat(c, policy);
  auto flat = rep.flatness.passed() ? FlatnessWitness::from_check(rep.flatness)
                                    : FlatnessWitness::attest("diagnostic only: connection not flat");
  MomentumSection tt = pullback_momenta(c, t.empty() ? legendre_local(lg) : t, flat);

  LabeledExpressions cons;
  for (int alpha = 0; alpha < b.m(); ++alpha)
    for (const auto& K : multi_indices_of_order(b.n(), k + 1)) {
      Expression e = pullback_prolongation(c, partial(lg, alpha, K), flat);
      for (int i = 0; i < b.n(); ++i)
        if (K[static_cast<std::size_t>(i)] > 0) e -= momentum_value(tt, alpha, minus(K, i), i);
      cons.emplace_back(b.jet_name(alpha, K), e);
    }
  rep.constraints = run_checks("constraints", std::move(cons), policy);

  LabeledExpressions field;
  for (int alpha = 0; alpha < b.m(); ++alpha)
    for (const auto& I : multi_indices_up_to(b.n(), k)) {
      Expression e = partial(lg, alpha, I);
      for (int i = 0; i < b.n(); ++i) {
        e -= total_derivative(b, momentum_value(tt, alpha, I, i), i);
        if (I[static_cast<std::size_t>(i)] > 0) e -= momentum_value(tt, alpha, minus(I, i), i);
      }
      field.emplace_back(b.jet_name(alpha, I), pullback_prolongation(c, e, flat));
    }
  rep.field_equations = run_checks("field-equations", std::move(field), policy);

  if (rep.flatness.passed() && rep.constraints.passed() && rep.field_equations.passed())
    rep.el_cross_check = check_hj_solution(euler_lagrange_system(lg, solve_for), c, policy);
  return rep;
}

}  // namespace hjkit
