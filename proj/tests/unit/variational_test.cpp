#include "hjkit/variational.hpp"

#include <gtest/gtest.h>

namespace hjkit {
namespace {

std::shared_ptr<Bundle> boussinesq_bundle() {
  auto b = std::make_shared<Bundle>(std::vector<std::string>{"t", "x"}, std::vector<std::string>{"u", "v"},
                                    std::vector<std::string>{"a", "b", "c"});
  return b;
}

Lagrangian boussinesq(const std::shared_ptr<Bundle>& b) {
  return {b, b->parse("1/2*(u_x^2 + v_x^2 + v*u_t - u*v_t) + u^3/3 + u^2/2")};
}

TEST(Variational, BoussinesqEulerLagrange) {
  auto b = boussinesq_bundle();
  auto el = euler_lagrange(boussinesq(b));
  ASSERT_EQ(el.size(), 2u);
  EXPECT_EQ(el[0], b->parse("-v_t + u + u^2 - u_xx"));
  EXPECT_EQ(el[1], b->parse("u_t - v_xx"));
}

TEST(Variational, BoussinesqLegendreAndHamiltonian) {
  auto b = boussinesq_bundle();
  auto lg = boussinesq(b);
  auto t = legendre_local(lg);
  EXPECT_EQ((t.at({0, {0, 0}, 1})), b->parse("u_x"));
  EXPECT_EQ((t.at({0, {0, 0}, 0})), b->parse("v/2"));
  EXPECT_EQ((t.at({1, {0, 0}, 1})), b->parse("v_x"));
  EXPECT_EQ((t.at({1, {0, 0}, 0})), b->parse("-u/2"));
  EXPECT_EQ(reduce_hamiltonian(lg, t), b->parse("1/2*(u_x^2 + v_x^2) - u^3/3 - u^2/2"));
  for (auto& [label, d] : first_variation_defect(lg, t)) EXPECT_TRUE(d.is_zero()) << label;
  auto cons = constraint_equations(lg);
  EXPECT_EQ(cons[0].second, b->parse("p_u__t - v/2"));
}

TEST(Variational, HigherOrderLegendre) {
  auto b = std::make_shared<Bundle>(std::vector<std::string>{"t", "x"}, std::vector<std::string>{"u"});
  Lagrangian lg{b, b->parse("u_xx^2*u_t + u_tx^3*u + u_tt*u_x^2*u_xx + u_txx*u_tt*u + u_xxx^2 + u_ttt*u_x")};
  auto t = legendre_local(lg);
  for (auto& [label, d] : first_variation_defect(lg, t)) EXPECT_TRUE(d.is_zero()) << label << ": " << d;
}

TEST(Variational, BoussinesqTravelingWave) {
  auto b = boussinesq_bundle();
  auto lg = boussinesq(b);
  auto conn = [&](const std::string& a2) {
    auto A = b->parse("sqrt(" + a2 + ")");
    auto C = b->parse("-c*u + a");
    return HolonomicConnection(b, 0, {{{0, {1, 0}}, -b->parse("c") * A}, {{0, {0, 1}}, A},
                                      {{1, {1, 0}}, -b->parse("c") * C}, {{1, {0, 1}}, C}});
  };
  auto good = check_generalized_hj(lg, conn("2/3*u^3 + (1 - c^2)*u^2 + 2*c*a*u + b"), {}, {}, {"v_t", "u_t"});
  EXPECT_TRUE(good.passed());
  ASSERT_TRUE(good.el_cross_check.has_value());
  auto printed = check_generalized_hj(lg, conn("u^3/3 + 1/2*(1 - c^2)*u^2 + a*u + b"), {}, {}, {"v_t", "u_t"});
  EXPECT_FALSE(printed.passed());
}

}  // namespace
}  // namespace hjkit
