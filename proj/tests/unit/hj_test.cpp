#include "hjkit/hj.hpp"

#include <gtest/gtest.h>

namespace hjkit {
namespace {

struct Burgers {
  std::shared_ptr<Bundle> b = std::make_shared<Bundle>(std::vector<std::string>{"t", "x"},
                                                       std::vector<std::string>{"u"}, std::vector<std::string>{"x0"});
  Burgers() {
    b->declare_unknown("A", {"t", "x", "u"});
    b->declare_unknown("B", {"t", "x", "u"});
  }
  Expression p(const std::string& s) const { return b->parse(s); }
  SolvedPde pde(const std::string& rhs) const { return SolvedPde(b, {{0, {1, 0}, p(rhs)}}); }
  HolonomicConnection conn(const std::string& a, const std::string& bb) const {
    return HolonomicConnection(b, 0, {{{0, {1, 0}}, p(a)}, {{0, {0, 1}}, p(bb)}});
  }
};

TEST(Hj, BurgersGeneratedAndComposed) {
  Burgers f;
  auto sys = generate_hj_system(f.pde("u_xx + u*u_x"), 0, f.conn("A", "B"));
  ASSERT_EQ(sys.equations.size(), 1u);
  EXPECT_EQ(sys.equations[0].second, f.p("A - B_x - B*B_u - u*B"));
  auto closed = compose_with_flatness(sys);
  ASSERT_EQ(closed.size(), 1u);
  EXPECT_EQ(closed[0].second, f.p("B_t - B_xx - 2*B*B_xu - B^2*B_uu - u*B_x - B^2"));
}

TEST(Hj, HeatEquations) {
  Burgers f;
  auto sys = generate_hj_system(f.pde("u_xx"), 0, f.conn("A", "B"));
  EXPECT_EQ(sys.equations[0].second, f.p("A - B_x - B*B_u"));
  EXPECT_EQ(compose_with_flatness(sys)[0].second, f.p("B_t - B_xx - 2*B*B_xu - B^2*B_uu"));
  auto rep = check_hj_solution(f.pde("u_xx"), f.conn("(x^2 - 2*t)/(4*t^2)*u", "-x/(2*t)*u"), {});
  EXPECT_TRUE(rep.passed());
  EXPECT_TRUE(rep.flatness.exact() && rep.containment.exact());
  EXPECT_TRUE(check_hj_solution(f.pde("u_xx"), f.conn("u", "u"), {}).passed());
  EXPECT_FALSE(check_hj_solution(f.pde("u_xx"), f.conn("2*u^3", "u^2"), {}).passed());
}

TEST(Hj, BurgersSolution) {
  Burgers f;
  auto rep = check_hj_solution(f.pde("u_xx + u*u_x"), f.conn("u^2/(x - x0)", "u/(x - x0)"), {});
  EXPECT_TRUE(rep.passed());
  EXPECT_TRUE(rep.containment.exact());
  auto bad = check_hj_solution(f.pde("u_xx + u*u_x"), f.conn("u", "x"), {});
  EXPECT_FALSE(bad.flatness.passed());
}

TEST(Hj, KdvFirstOrder) {
  auto b = std::make_shared<Bundle>(std::vector<std::string>{"x", "t"}, std::vector<std::string>{"u"});
  SolvedPde kdv(b, {{0, {0, 1}, b->parse("6*u*u_x - u_xxx")}});
  auto A = b->parse("(u_t - 6*u*u_x)^2/(12*u_x^2)");
  auto C = b->parse("u_t*(u_t - 6*u*u_x)^2/(12*u_x^3)");
  auto B = b->parse("u_t^2*(u_t - 6*u*u_x)^2/(12*u_x^4)");
  HolonomicConnection c(b, 1, {{{0, {2, 0}}, A}, {{0, {1, 1}}, C}, {{0, {0, 2}}, B}});
  auto rep = check_hj_solution(kdv, c, {});
  EXPECT_TRUE(rep.flatness.exact());
  EXPECT_TRUE(rep.containment.exact());
  auto neg = HolonomicConnection(b, 1, {{{0, {2, 0}}, A}, {{0, {1, 1}}, C}, {{0, {0, 2}}, -B}});
  EXPECT_FALSE(is_flat(neg, {}).passed());

  LieField boost{{b->parse("-6*t"), 0}, {1}};
  auto y = prolong_lie_field(*b, boost, 3);
  EXPECT_EQ((y.vertical.at({0, {0, 0}})), Expression(1));
  EXPECT_EQ((y.vertical.at({0, {0, 1}})), b->parse("6*u_x"));
  EXPECT_EQ((y.vertical.at({0, {1, 0}})), Expression(0));
  EXPECT_EQ((y.vertical.at({0, {1, 1}})), b->parse("6*u_xx"));
  EXPECT_EQ((y.vertical.at({0, {0, 2}})), b->parse("12*u_xt"));
  EXPECT_EQ((y.vertical.at({0, {2, 0}})), Expression(0));
  EXPECT_TRUE(is_lie_symmetry(boost, kdv, {}).exact());
}

TEST(Hj, Oscillator) {
  auto b = std::make_shared<Bundle>(std::vector<std::string>{"t"}, std::vector<std::string>{"x"});
  b->declare_unknown("X", {"t", "x"});
  SolvedPde el(b, {{0, {2}, b->parse("-x")}});
  auto sys = generate_hj_system(el, 0, HolonomicConnection(b, 0, {{{0, {1}}, b->parse("X")}}));
  EXPECT_EQ(sys.equations[0].second, b->parse("X_t + X*X_x + x"));
  auto rep = check_hj_solution(el, HolonomicConnection(b, 0, {{{0, {1}}, b->parse("-x*tan(t)")}}), {});
  EXPECT_TRUE(rep.passed());
  EXPECT_EQ(rep.containment.checks[0].verdict.status, ZeroStatus::ZeroProbabilistic);
  EXPECT_LE(rep.containment.checks[0].verdict.max_magnitude, 1e-10);
}

}  // namespace
}  // namespace hjkit
