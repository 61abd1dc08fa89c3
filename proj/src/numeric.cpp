#include "hjkit/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace hjkit {

// -------------------------------------------------------------------- grid

void GridSpec::validate(int n) const {
  if (static_cast<int>(lo.size()) != n || static_cast<int>(hi.size()) != n || static_cast<int>(h.size()) != n)
    throw std::invalid_argument("grid dimension does not match the base");
  for (int i = 0; i < n; ++i) {
    auto s = static_cast<std::size_t>(i);
    if (!(h[s] > 0)) throw std::invalid_argument("grid step must be positive");
    if (!(hi[s] >= lo[s])) throw std::invalid_argument("grid range is empty");
    double steps = (hi[s] - lo[s]) / h[s];
    if (std::abs(steps - std::round(steps)) > 1e-6) throw std::invalid_argument("grid step does not divide the range");
  }
  std::vector<int> sorted = path;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < n; ++i)
    if (static_cast<int>(sorted.size()) != n || sorted[static_cast<std::size_t>(i)] != i)
      throw std::invalid_argument("integration path must list every base index once");
}

int GridSpec::count(int axis) const {
  auto s = static_cast<std::size_t>(axis);
  return static_cast<int>(std::lround((hi[s] - lo[s]) / h[s])) + 1;
}

std::size_t GridSpec::node_count() const {
  std::size_t n = 1;
  for (std::size_t i = 0; i < lo.size(); ++i) n *= static_cast<std::size_t>(count(static_cast<int>(i)));
  return n;
}

double GridSpec::coordinate(int axis, int index) const {
  auto s = static_cast<std::size_t>(axis);
  return lo[s] + index * h[s];
}

std::size_t SampledSection::node_index(const std::vector<int>& idx) const {
  std::size_t linear = 0;
  for (int axis : grid.path)
    linear = linear * static_cast<std::size_t>(grid.count(axis)) + static_cast<std::size_t>(idx[static_cast<std::size_t>(axis)]);
  return linear;
}

std::vector<int> SampledSection::node_at(std::size_t linear) const {
  std::vector<int> idx(grid.lo.size(), 0);
  for (auto it = grid.path.rbegin(); it != grid.path.rend(); ++it) {
    auto cnt = static_cast<std::size_t>(grid.count(*it));
    idx[static_cast<std::size_t>(*it)] = static_cast<int>(linear % cnt);
    linear /= cnt;
  }
  return idx;
}

std::optional<std::size_t> SampledSection::coord_index(Atom a) const {
  for (std::size_t q = 0; q < coords.size(); ++q)
    if (coords[q] == a) return q;
  return std::nullopt;
}

void SampledSection::write_csv(std::ostream& os) const {
  bool first = true;
  for (Atom a : base) os << (first ? "" : ",") << a->name, first = false;
  for (Atom a : coords) os << "," << a->name;
  os << "\n" << std::setprecision(17);
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    auto idx = node_at(node);
    for (std::size_t i = 0; i < base.size(); ++i)
      os << (i ? "," : "") << grid.coordinate(static_cast<int>(i), idx[i]);
    for (std::size_t q = 0; q < coords.size(); ++q) os << "," << value(node, q);
    os << "\n";
  }
}

// ------------------------------------------------------------- integration

namespace {

Bindings numeric_bindings(const PointValues& params) {
  Bindings b;
  for (const auto& [a, v] : params) b[a] = Expression(Rational(v));
  return b;
}

std::string describe_node(const Bundle& b, const std::vector<double>& x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << b.base_names()[i] << "=" << x[i];
  os << ")";
  return os.str();
}

class Sweeper {
 public:
  Sweeper(const HolonomicConnection& c, const PointValues& params) : b_(c.bundle()) {
    coords_ = b_.jet_coordinates(c.order());
    std::vector<Atom> inputs;
    for (int i = 0; i < b_.n(); ++i) inputs.push_back(b_.base(i));
    inputs.insert(inputs.end(), coords_.begin(), coords_.end());
    Bindings bind = numeric_bindings(params);
    for (int i = 0; i < b_.n(); ++i) {
      std::vector<Evaluator> axis;
      for (Atom q : coords_) {
        Expression rhs = hjkit::order(q->multi) < c.order() ? b_.u(q->dep, plus(q->multi, i))
                                                            : c.coefficient(q->dep, plus(q->multi, i));
        axis.emplace_back(substitute(rhs, bind), inputs);
      }
      rhs_.push_back(std::move(axis));
    }
  }

  const std::vector<Atom>& coords() const { return coords_; }

  void run(SampledSection& s, const std::vector<int>& origin, const std::vector<double>& y0) {
    const std::size_t nq = coords_.size();
    std::vector<char> filled(s.grid.node_count(), 0);
    s.values.assign(s.grid.node_count() * nq, 0.0);
    std::size_t o = s.node_index(origin);
    std::copy(y0.begin(), y0.end(), s.values.begin() + static_cast<long>(o * nq));
    filled[o] = 1;
    std::vector<std::size_t> frontier{o};
    for (int axis : s.grid.path) {
      std::vector<std::size_t> next;
      for (std::size_t start : frontier) {
        next.push_back(start);
        for (int dir : {1, -1}) {
          auto idx = s.node_at(start);
          std::vector<double> y(s.values.begin() + static_cast<long>(start * nq),
                                s.values.begin() + static_cast<long>((start + 1) * nq));
          while (true) {
            int to = idx[static_cast<std::size_t>(axis)] + dir;
            if (to < 0 || to >= s.grid.count(axis)) break;
            std::vector<double> x(idx.size());
            for (std::size_t i = 0; i < idx.size(); ++i) x[i] = s.grid.coordinate(static_cast<int>(i), idx[i]);
            y = step(axis, x, y, dir * s.grid.h[static_cast<std::size_t>(axis)]);
            idx[static_cast<std::size_t>(axis)] = to;
            std::size_t node = s.node_index(idx);
            std::copy(y.begin(), y.end(), s.values.begin() + static_cast<long>(node * nq));
            filled[node] = 1;
            next.push_back(node);
          }
        }
      }
      frontier = std::move(next);
    }
  }

 private:
  std::vector<double> field(int axis, const std::vector<double>& x, const std::vector<double>& y) const {
    std::vector<double> in(x);
    in.insert(in.end(), y.begin(), y.end());
    std::vector<double> out(y.size());
    try {
      for (std::size_t q = 0; q < y.size(); ++q) out[q] = rhs_[static_cast<std::size_t>(axis)][q](in);
    } catch (const EvalError& e) {
      throw NumericError(std::string(e.what()) + " at " + describe_node(b_, x));
    }
    return out;
  }

  std::vector<double> step(int axis, std::vector<double> x, const std::vector<double>& y, double h) const {
    auto axpy = [](const std::vector<double>& a, double s, const std::vector<double>& d) {
      std::vector<double> r(a);
      for (std::size_t q = 0; q < r.size(); ++q) r[q] += s * d[q];
      return r;
    };
    auto& xa = x[static_cast<std::size_t>(axis)];
    const double x0 = xa;
    auto k1 = field(axis, x, y);
    xa = x0 + h / 2;
    auto k2 = field(axis, x, axpy(y, h / 2, k1));
    auto k3 = field(axis, x, axpy(y, h / 2, k2));
    xa = x0 + h;
    auto k4 = field(axis, x, axpy(y, h, k3));
    std::vector<double> r(y);
    for (std::size_t q = 0; q < r.size(); ++q) {
      r[q] += h / 6 * (k1[q] + 2 * k2[q] + 2 * k3[q] + k4[q]);
      if (!std::isfinite(r[q])) throw NumericError("solution blew up near " + describe_node(b_, x));
    }
    return r;
  }

  const Bundle& b_;
  std::vector<Atom> coords_;
  std::vector<std::vector<Evaluator>> rhs_;
};

}  // namespace

SampledSection integrate_section(const HolonomicConnection& c, const std::vector<double>& base_point,
                                 const PointValues& initial, const GridSpec& grid, const FlatnessWitness&,
                                 const PointValues& params) {
  const Bundle& b = c.bundle();
  grid.validate(b.n());
  if (static_cast<int>(base_point.size()) != b.n()) throw std::invalid_argument("initial point dimension mismatch");
  std::vector<int> origin;
  for (int i = 0; i < b.n(); ++i) {
    auto s = static_cast<std::size_t>(i);
    double r = (base_point[s] - grid.lo[s]) / grid.h[s];
    int idx = static_cast<int>(std::lround(r));
    if (std::abs(r - idx) > 1e-6 || idx < 0 || idx >= grid.count(i))
      throw std::invalid_argument("initial point is not a grid node");
    origin.push_back(idx);
  }
  Sweeper sw(c, params);
  std::vector<double> y0;
  for (Atom q : sw.coords()) {
    auto it = initial.find(q);
    if (it == initial.end()) throw std::invalid_argument("initial value missing for " + q->name);
    y0.push_back(it->second);
  }
  SampledSection s;
  s.grid = grid;
  for (int i = 0; i < b.n(); ++i) s.base.push_back(b.base(i));
  s.coords = sw.coords();
  sw.run(s, origin, y0);

  SampledSection rev = s;
  std::reverse(rev.grid.path.begin(), rev.grid.path.end());
  sw.run(rev, origin, y0);
  for (std::size_t node = 0; node < s.grid.node_count(); ++node) {
    std::size_t r = rev.node_index(s.node_at(node));
    for (std::size_t q = 0; q < s.coords.size(); ++q)
      s.defect = std::max(s.defect, std::abs(s.value(node, q) - rev.value(r, q)));
  }
  return s;
}

// ---------------------------------------------------------------- residual

namespace {

void record(ResidualReport& rep, std::size_t rule, const std::string& label, double v, const std::vector<double>& x) {
  auto& slot = rep.per_rule[rule];
  slot.first = label;
  slot.second = std::max(slot.second, std::abs(v));
  if (std::abs(v) > rep.max_abs || rep.argmax.empty()) {
    rep.max_abs = std::max(rep.max_abs, std::abs(v));
    rep.argmax = x;
    rep.rule = label;
  }
}

Expression closed_jet(const Bundle& b, const ClosedForm& u, int alpha, const MultiIndex& I) {
  Expression e = u.at(static_cast<std::size_t>(alpha));
  for (int i = 0; i < b.n(); ++i)
    for (int k = 0; k < I[static_cast<std::size_t>(i)]; ++k) e = differentiate(e, b.base(i));
  return e;
}

}  // namespace

ResidualReport residual(const SolvedPde& s, const ClosedForm& u, const std::vector<std::vector<double>>& points,
                        const PointValues& params) {
  const Bundle& b = s.bundle();
  if (static_cast<int>(u.size()) != b.m()) throw std::invalid_argument("closed form needs one expression per dependent");
  Bindings pbind = numeric_bindings(params);
  std::vector<Atom> inputs;
  for (int i = 0; i < b.n(); ++i) inputs.push_back(b.base(i));
  ResidualReport rep;
  rep.per_rule.resize(s.rules().size());
  for (std::size_t r = 0; r < s.rules().size(); ++r) {
    const Rule& rule = s.rules()[r];
    Expression e = b.u(rule.alpha, rule.K) - rule.rhs;
    Bindings bind = pbind;
    for (Atom a : free_symbols(e))
      if (b.is_jet(a)) bind[a] = substitute(closed_jet(b, u, a->dep, a->multi), pbind);
    Evaluator ev(substitute(e, bind), inputs);
    for (const auto& x : points) {
      double v;
      try {
        v = ev(x);
      } catch (const EvalError& err) {
        throw NumericError(std::string(err.what()) + " at " + describe_node(b, x));
      }
      record(rep, r, b.jet_name(rule.alpha, rule.K), v, x);
    }
  }
  rep.points = points.size();
  return rep;
}

ResidualReport residual(const SolvedPde& s, const SampledSection& sec, DerivativeSource source,
                        const HolonomicConnection* c, const PointValues& params) {
  const Bundle& b = s.bundle();
  if (source == DerivativeSource::Lift && !c) throw std::invalid_argument("lift residual needs the connection");
  int k = -1;
  for (Atom q : sec.coords) k = std::max(k, hjkit::order(q->multi));
  Bindings pbind = numeric_bindings(params);
  ResidualReport rep;
  rep.per_rule.resize(s.rules().size());
  const std::size_t nodes = sec.grid.node_count();

  for (std::size_t r = 0; r < s.rules().size(); ++r) {
    const Rule& rule = s.rules()[r];
    const std::string label = b.jet_name(rule.alpha, rule.K);
    Expression e = substitute(b.u(rule.alpha, rule.K) - rule.rhs, pbind);
    if (source == DerivativeSource::Lift) {
      auto flat = FlatnessWitness::attest("section integrated from this connection");
      e = substitute(pullback_prolongation(*c, e, flat), pbind);
    }
    std::vector<Atom> inputs(sec.base);
    std::vector<Atom> jets;
    for (Atom a : free_symbols(e))
      if (b.is_jet(a)) jets.push_back(a);
    inputs.insert(inputs.end(), jets.begin(), jets.end());
    Evaluator ev(e, inputs);

    // For each jet: a stored coordinate and the derivative still to take.
    struct Source {
      std::size_t coord;
      MultiIndex rest;
    };
    std::vector<Source> src;
    std::vector<int> margin(static_cast<std::size_t>(b.n()), 0);
    for (Atom a : jets) {
      MultiIndex J(a->multi.size(), 0);
      if (hjkit::order(a->multi) <= k) {
        J = a->multi;
      } else if (source == DerivativeSource::Lift) {
        throw NumericError("lifted expression still needs " + a->name);
      } else {
        for (int i = 0; i < b.n() && hjkit::order(J) < k; ++i) {  // greedy stored factor J <= M with |J| = k
          auto si = static_cast<std::size_t>(i);
          J[si] = std::min(a->multi[si], k - hjkit::order(J));
        }
      }
      auto q = sec.coord_index(b.jet(a->dep, J));
      if (!q) throw NumericError("section does not store " + b.jet_name(a->dep, J));
      MultiIndex rest = a->multi;
      for (std::size_t i = 0; i < rest.size(); ++i) {
        rest[i] -= J[i];
        margin[i] = std::max(margin[i], (rest[i] + 1) / 2);
      }
      src.push_back({*q, rest});
    }

    std::function<double(std::size_t, std::vector<int>&, MultiIndex&)> fd = [&](std::size_t coord, std::vector<int>& idx,
                                                                                 MultiIndex& rest) -> double {
      for (std::size_t a = 0; a < rest.size(); ++a) {
        if (rest[a] == 0) continue;
        const double h = sec.grid.h[a];
        int take = rest[a] >= 2 ? 2 : 1;
        rest[a] -= take;
        idx[a] += 1;
        double fp = fd(coord, idx, rest);
        idx[a] -= 2;
        double fm = fd(coord, idx, rest);
        idx[a] += 1;
        double out = take == 2 ? (fp - 2 * fd(coord, idx, rest) + fm) / (h * h) : (fp - fm) / (2 * h);
        rest[a] += take;
        return out;
      }
      return sec.value(sec.node_index(idx), coord);
    };

    std::size_t used = 0;
    for (std::size_t node = 0; node < nodes; ++node) {
      auto idx = sec.node_at(node);
      bool inside = true;
      for (std::size_t i = 0; i < idx.size(); ++i)
        inside &= idx[i] - margin[i] >= 0 && idx[i] + margin[i] < sec.grid.count(static_cast<int>(i));
      if (!inside) continue;
      std::vector<double> in;
      for (std::size_t i = 0; i < idx.size(); ++i) in.push_back(sec.grid.coordinate(static_cast<int>(i), idx[i]));
      std::vector<double> x(in);
      for (auto& sj : src) in.push_back(fd(sj.coord, idx, sj.rest));
      double v;
      try {
        v = ev(in);
      } catch (const EvalError& err) {
        throw NumericError(std::string(err.what()) + " at " + describe_node(b, x));
      }
      record(rep, r, label, v, x);
      ++used;
    }
    if (used == 0) throw NumericError("insufficient grid margin for the difference stencils of " + label);
    rep.points = std::max(rep.points, used);
  }
  return rep;
}

double max_error(const SampledSection& sec, const Bundle& b, const ClosedForm& u, const PointValues& params) {
  Bindings pbind = numeric_bindings(params);
  std::vector<Atom> inputs(sec.base);
  double err = 0.0;
  for (int alpha = 0; alpha < b.m(); ++alpha) {
    auto q = sec.coord_index(b.jet(alpha, MultiIndex(static_cast<std::size_t>(b.n()), 0)));
    if (!q) throw NumericError("section lacks " + b.dependent_names()[static_cast<std::size_t>(alpha)]);
    Evaluator ev(substitute(u.at(static_cast<std::size_t>(alpha)), pbind), inputs);
    for (std::size_t node = 0; node < sec.grid.node_count(); ++node) {
      auto idx = sec.node_at(node);
      std::vector<double> x;
      for (std::size_t i = 0; i < idx.size(); ++i) x.push_back(sec.grid.coordinate(static_cast<int>(i), idx[i]));
      err = std::max(err, std::abs(sec.value(node, *q) - ev(x)));
    }
  }
  return err;
}

}  // namespace hjkit
