#include "hjkit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hjkit {

namespace {

// Input atoms of e: symbols, plus unknown-function atoms when requested
// (their arguments are then not descended into).
void collect_inputs(const Expression& e, bool unknowns_as_inputs, std::vector<Atom>& out) {
  for (Atom a : e.atoms()) {
    if (a->is_symbol() || (a->kind == AtomKind::Unknown && unknowns_as_inputs)) {
      if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
    } else if (a->kind == AtomKind::Unknown) {
      throw EvalError(EvalError::Kind::NotEvaluable, "cannot evaluate unknown function " + atom_text(a));
    } else {
      for (const auto& arg : a->args) collect_inputs(arg, unknowns_as_inputs, out);
    }
  }
}

double apply_fn(ElementaryFn fn, double x) {
  using K = EvalError::Kind;
  double r = 0.0;
  switch (fn) {
    case ElementaryFn::Exp: r = std::exp(x); break;
    case ElementaryFn::Ln:
      if (x <= 0) throw EvalError(K::Domain, "ln of non-positive value");
      r = std::log(x);
      break;
    case ElementaryFn::Sqrt:
      if (x < 0) throw EvalError(K::Domain, "sqrt of negative value");
      r = std::sqrt(x);
      break;
    case ElementaryFn::Sin: r = std::sin(x); break;
    case ElementaryFn::Cos: r = std::cos(x); break;
    case ElementaryFn::Tan:
      if (std::abs(std::cos(x)) < 1e-300) throw EvalError(K::Pole, "tan at a pole");
      r = std::tan(x);
      break;
    case ElementaryFn::Sech: r = 1.0 / std::cosh(x); break;
    case ElementaryFn::Tanh: r = std::tanh(x); break;
  }
  if (!std::isfinite(r)) throw EvalError(K::Domain, std::string(elementary_name(fn)) + " overflow");
  return r;
}

}  // namespace

Evaluator::Evaluator(const Expression& e, bool unknowns_as_inputs) { compile(e, nullptr, unknowns_as_inputs); }

Evaluator::Evaluator(const Expression& e, const std::vector<Atom>& inputs) { compile(e, &inputs, true); }

void Evaluator::compile(const Expression& e, const std::vector<Atom>* fixed, bool unknowns_as_inputs) {
  std::vector<Atom> found;
  collect_inputs(e, unknowns_as_inputs, found);
  if (fixed) {
    inputs_ = *fixed;
    for (Atom a : found)
      if (std::find(inputs_.begin(), inputs_.end(), a) == inputs_.end())
        throw EvalError(EvalError::Kind::Unbound, "no value for " + atom_text(a));
  } else {
    inputs_ = std::move(found);
    std::sort(inputs_.begin(), inputs_.end(), AtomLess{});
  }
  for (Atom a : inputs_) slot_of_.emplace(a, slot_count_++);

  // Elementary atoms in dependency order (arguments first).
  std::function<void(const Expression&)> visit = [&](const Expression& x) {
    for (Atom a : x.atoms()) {
      if (slot_of_.count(a) || a->kind != AtomKind::Elementary) continue;
      visit(a->args[0]);
      FunctionSlot fs{a->fn, compile_rational(a->args[0]), slot_count_};
      slot_of_.emplace(a, slot_count_++);
      functions_.push_back(std::move(fs));
    }
  };
  visit(e);
  top_ = compile_rational(e);
}

Evaluator::CRational Evaluator::compile_rational(const Expression& e) const {
  auto conv = [&](const Polynomial& p) {
    CPoly out;
    for (const Term& t : p.terms()) {
      CTerm ct{t.coeff.get_d(), {}};
      for (const auto& [a, k] : t.monomial.factors()) ct.factors.emplace_back(slot_of_.at(a), k);
      out.terms.push_back(std::move(ct));
    }
    return out;
  };
  return {conv(e.num()), conv(e.den())};
}

double Evaluator::eval_poly(const CPoly& p, const std::vector<double>& slots, double* abs_sum) {
  double sum = 0.0, abs = 0.0;
  for (const CTerm& t : p.terms) {
    double v = t.coeff;
    for (const auto& [s, k] : t.factors) {
      double x = slots[s];
      if (k == 1) {
        v *= x;
      } else if (k == 2) {
        v *= x * x;
      } else {
        v *= std::pow(x, k);
      }
    }
    sum += v;
    abs += std::abs(v);
  }
  if (abs_sum) *abs_sum = abs;
  return sum;
}

double Evaluator::eval_rational(const CRational& r, const std::vector<double>& slots, double* scale) {
  double nabs = 0.0;
  double n = eval_poly(r.num, slots, &nabs);
  double d = eval_poly(r.den, slots, nullptr);
  if (d == 0.0 || !std::isfinite(d)) throw EvalError(EvalError::Kind::Pole, "denominator vanishes");
  double v = n / d;
  if (!std::isfinite(v)) throw EvalError(EvalError::Kind::Pole, "non-finite value");
  if (scale) *scale = nabs / std::abs(d);
  return v;
}

double Evaluator::evaluate(std::span<const double> values, double* scale) const {
  if (values.size() != inputs_.size()) throw std::invalid_argument("Evaluator: wrong number of inputs");
  std::vector<double> slots(static_cast<std::size_t>(slot_count_));
  std::copy(values.begin(), values.end(), slots.begin());
  for (const FunctionSlot& f : functions_) slots[f.slot] = apply_fn(f.fn, eval_rational(f.arg, slots, nullptr));
  return eval_rational(top_, slots, scale);
}

double eval_point(const Expression& e, const PointValues& point) {
  if (e.is_constant()) return e.constant_value().get_d();
  std::vector<Atom> found;
  collect_inputs(e, true, found);
  std::vector<double> values;
  for (Atom a : found) {
    auto it = point.find(a);
    if (it == point.end()) throw EvalError(EvalError::Kind::Unbound, "no value for " + atom_text(a));
    values.push_back(it->second);
  }
  Evaluator ev(e, found);
  return ev(values);
}

const char* to_string(ZeroStatus s) {
  switch (s) {
    case ZeroStatus::ZeroExact: return "zero-exact";
    case ZeroStatus::ZeroProbabilistic: return "zero-probabilistic";
    case ZeroStatus::Nonzero: return "nonzero";
    case ZeroStatus::Indeterminate: return "indeterminate";
  }
  return "?";
}

ZeroVerdict is_zero(const Expression& e, const ZeroTestPolicy& policy) {
  ZeroVerdict v;
  if (e.is_zero()) {
    v.status = ZeroStatus::ZeroExact;
    return v;
  }
  if (e.is_constant()) {
    v.status = ZeroStatus::Nonzero;
    v.witness_value = e.constant_value().get_d();
    v.max_magnitude = std::abs(v.witness_value);
    return v;
  }
  // Without elementary functions the canonical form is a decision procedure:
  // a nonzero reduced numerator is a nonzero function. Sampling only finds a witness.
  const bool algebraic = !contains_elementary(e);
  Evaluator ev(e, true);
  std::mt19937_64 rng(policy.seed);
  std::uniform_real_distribution<double> dist(policy.box_lo, policy.box_hi);
  std::vector<double> x(ev.inputs().size());

  auto record_witness = [&](double value) {
    v.status = ZeroStatus::Nonzero;
    v.witness_value = value;
    v.witness.clear();
    for (std::size_t i = 0; i < x.size(); ++i) v.witness.emplace_back(atom_text(ev.inputs()[i]), x[i]);
  };

  const int samples = std::max(1, policy.samples);
  const bool probabilistic = policy.mode == ZeroTestPolicy::Mode::ExactThenProbabilistic && !algebraic;
  int failed_points = 0;
  for (int s = 0; s < samples; ++s) {
    bool ok = false;
    for (int attempt = 0; attempt <= policy.retries && !ok; ++attempt) {
      for (double& xi : x) xi = dist(rng);
      try {
        double scale = 0.0;
        double value = ev.evaluate(x, &scale);
        ok = true;
        ++v.samples;
        v.max_magnitude = std::max(v.max_magnitude, std::abs(value));
        if (std::abs(value) > policy.tolerance * std::max(1.0, scale)) {
          record_witness(value);
          return v;
        }
      } catch (const EvalError&) {
      }
    }
    if (!ok) ++failed_points;
  }
  if (algebraic) {
    v.status = ZeroStatus::Nonzero;
    v.note = "nonzero canonical form; sampled values stayed below tolerance";
    return v;
  }
  if (!probabilistic) {
    v.status = ZeroStatus::Indeterminate;
    v.note = "exact simplification inconclusive and sampling disabled";
    return v;
  }
  if (failed_points > 0 || v.samples == 0) {
    v.status = ZeroStatus::Indeterminate;
    v.note = "sampling hit poles or branch cuts at " + std::to_string(failed_points) + " point(s)";
    return v;
  }
  v.status = ZeroStatus::ZeroProbabilistic;
  return v;
}

}  // namespace hjkit
