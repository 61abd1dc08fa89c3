#include "hjkit/eval.hpp"
#include "hjkit/parser.hpp"

#include <gtest/gtest.h>

namespace hjkit {
namespace {

class ExprTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ctx.add_symbol("t");
    ctx.add_symbol("x");
    ctx.add_symbol("u");
    ctx.add_symbol("u_x");
    ctx.add_symbol("u_t");
    ctx.add_unknown("B", {"t", "x", "u"});
  }
  Expression p(const std::string& s) { return parse_expr(s, ctx); }
  Atom a(const std::string& s) { return *p(s).as_atom(); }
  SimpleResolver ctx;
};

TEST_F(ExprTest, CanonicalFormsAreEqual) {
  EXPECT_EQ(p("(x+1)^2"), p("x^2 + 2*x + 1"));
  EXPECT_EQ(p("(x^2-1)/(x-1)"), p("x+1"));
  EXPECT_EQ(p("1/x + 1/u"), p("(x+u)/(x*u)"));
  EXPECT_TRUE(p("x/(2*x) - 1/2").is_zero());
  EXPECT_EQ(p("0.25*x"), p("x/4"));
}

TEST_F(ExprTest, SyntaxErrorOffset) {
  try {
    p("u_x +");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 5u);
  }
  EXPECT_THROW(p("2 x"), ParseError);
  EXPECT_THROW(p("y + 1"), UndeclaredSymbol);
  EXPECT_THROW(p("x^0.5"), ParseError);
  EXPECT_THROW(p("x/0"), ParseError);
}

TEST_F(ExprTest, ElementaryDerivatives) {
  EXPECT_EQ(differentiate(p("sech(u)"), a("u")), p("-sech(u)*tanh(u)"));
  EXPECT_EQ(differentiate(p("tanh(u)"), a("u")), p("sech(u)^2"));
  EXPECT_EQ(differentiate(p("exp(x^2)"), a("x")), p("2*x*exp(x^2)"));
  EXPECT_EQ(differentiate(p("ln(x)"), a("x")), p("1/x"));
  EXPECT_EQ(differentiate(p("sqrt(x)"), a("x")), p("1/(2*sqrt(x))"));
  EXPECT_EQ(differentiate(p("sin(x)"), a("x")), p("cos(x)"));
  EXPECT_EQ(differentiate(p("cos(x)"), a("x")), p("-sin(x)"));
  EXPECT_EQ(differentiate(p("tan(x)"), a("x")), p("1/cos(x)^2"));
}

TEST_F(ExprTest, UnknownChainRule) {
  Expression d = differentiate(p("B(t, x, u^2)"), a("u"));
  EXPECT_EQ(d, p("2*u*B_u(t, x, u^2)"));
  EXPECT_EQ(differentiate(p("B"), a("x")), p("B_x"));
  EXPECT_EQ(p("B_xu"), p("B_ux"));
}

TEST_F(ExprTest, SubstituteUnknown) {
  const UnknownFunction& b = *ctx.unknown("B");
  Expression e = p("B_x + B*B_u + u*B");
  Expression body = p("-x*u/t");
  Expression r = substitute_unknown(e, b, body);
  EXPECT_EQ(r, p("-u/t + x^2*u/t^2 - x*u^2/t"));
}

TEST_F(ExprTest, TextRoundTrip) {
  for (const char* s : {"x^2/(u - 1) - 3/2*u_x", "sech(u - t)^2*B_x", "exp(-x^2/(4*t))/sqrt(t)", "-u"}) {
    Expression e = p(s);
    EXPECT_EQ(p(e.str()), e) << s << " -> " << e.str();
  }
}

TEST_F(ExprTest, ZeroTest) {
  auto v = is_zero(p("sin(x)^2 + cos(x)^2 - 1"));
  EXPECT_EQ(v.status, ZeroStatus::ZeroProbabilistic);
  ZeroTestPolicy exact;
  exact.mode = ZeroTestPolicy::Mode::ExactOnly;
  EXPECT_EQ(is_zero(p("sin(x)^2 + cos(x)^2 - 1"), exact).status, ZeroStatus::Indeterminate);
  auto n = is_zero(p("x - u"));
  EXPECT_EQ(n.status, ZeroStatus::Nonzero);
  EXPECT_EQ(n.witness.size(), 2u);
  EXPECT_EQ(is_zero(p("0*x")).status, ZeroStatus::ZeroExact);
  EXPECT_EQ(is_zero(p("sin(x) - x")).status, ZeroStatus::Nonzero);
}

TEST_F(ExprTest, EvalErrors) {
  PointValues pt{{a("x"), 0.0}};
  EXPECT_THROW(eval_point(p("1/x"), pt), EvalError);
  EXPECT_THROW(eval_point(p("ln(x)"), pt), EvalError);
  EXPECT_THROW(eval_point(p("x + u"), pt), EvalError);
  EXPECT_DOUBLE_EQ(eval_point(p("exp(x) + 2"), pt), 3.0);
}

}  // namespace
}  // namespace hjkit
