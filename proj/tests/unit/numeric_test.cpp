#include "hjkit/numeric.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace hjkit {
namespace {

struct Plane {
  std::shared_ptr<Bundle> b = std::make_shared<Bundle>(std::vector<std::string>{"t", "x"},
                                                       std::vector<std::string>{"u"}, std::vector<std::string>{"x0"});
  HolonomicConnection conn(const std::string& a, const std::string& bb) const {
    return HolonomicConnection(b, 0, {{{0, {1, 0}}, b->parse(a)}, {{0, {0, 1}}, b->parse(bb)}});
  }
  GridSpec grid(double t0, double t1, double x0, double x1, double h) const {
    return GridSpec{{t0, x0}, {t1, x1}, {h, h}, {0, 1}};
  }
};

TEST(Numeric, BurgersSection) {
  Plane p;
  auto c = p.conn("u^2/(x - x0)", "u/(x - x0)");
  PointValues params{{p.b->param("x0"), 1.0}};
  auto s = integrate_section(c, {0, 0}, {{p.b->jet(0, {0, 0}), -1.0}}, p.grid(0, 0.5, 0, 0.5, 0.01),
                             FlatnessWitness::attest("test"), params);
  double err = max_error(s, *p.b, {p.b->parse("-(x - 1)/(t - 1)")});
  EXPECT_LE(err, 1e-8);
  EXPECT_LE(s.defect, 1e-10);
  SolvedPde burgers(p.b, {{0, {1, 0}, p.b->parse("u_xx + u*u_x")}});
  auto lift = residual(burgers, s, DerivativeSource::Lift, &c, params);
  EXPECT_LE(lift.max_abs, 1e-8);
  auto fd = residual(burgers, s, DerivativeSource::Difference, nullptr, params);
  EXPECT_LE(fd.max_abs, 1e-2);
  std::cout << "burgers err " << err << " defect " << s.defect << " lift " << lift.max_abs << " fd " << fd.max_abs << "\n";
}

TEST(Numeric, HeatKernel) {
  Plane p;
  auto c = p.conn("(x^2 - 2*t)/(4*t^2)*u", "-x/(2*t)*u");
  auto s = integrate_section(c, {1, 0}, {{p.b->jet(0, {0, 0}), 1.0}}, p.grid(1, 2, 0, 1, 0.01),
                             FlatnessWitness::attest("test"));
  double err = max_error(s, *p.b, {p.b->parse("exp(-x^2/(4*t))/sqrt(t)")});
  EXPECT_LE(err, 1e-7);
  std::cout << "heat err " << err << " defect " << s.defect << "\n";
}

TEST(Numeric, Convergence) {
  Plane p;
  auto c = p.conn("u^2/(x - x0)", "u/(x - x0)");
  PointValues params{{p.b->param("x0"), 1.0}};
  std::vector<double> errs;
  for (double h : {0.1, 0.05, 0.025}) {
    auto s = integrate_section(c, {0, 0}, {{p.b->jet(0, {0, 0}), -1.0}}, p.grid(0, 0.5, 0, 0.5, h),
                               FlatnessWitness::attest("test"), params);
    errs.push_back(max_error(s, *p.b, {p.b->parse("-(x - 1)/(t - 1)")}));
  }
  std::cout << "errs " << errs[0] << " " << errs[1] << " " << errs[2] << " ratios " << errs[0] / errs[1] << " "
            << errs[1] / errs[2] << "\n";
}

}  // namespace
}  // namespace hjkit
