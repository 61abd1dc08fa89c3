#include "hjkit/problem.hpp"

#include <gtest/gtest.h>

namespace hjkit {
namespace {

std::string fixture(const std::string& name) { return std::string(HJKIT_FIXTURES) + "/" + name; }

void expect_same(const ProblemFile& a, const ProblemFile& b) {
  EXPECT_EQ(a.bundle->base_names(), b.bundle->base_names());
  EXPECT_EQ(a.bundle->dependent_names(), b.bundle->dependent_names());
  EXPECT_EQ(a.bundle->param_names(), b.bundle->param_names());
  ASSERT_EQ(a.equations.size(), b.equations.size());
  for (std::size_t i = 0; i < a.equations.size(); ++i) {
    ASSERT_EQ(a.equations[i].rules.size(), b.equations[i].rules.size());
    for (std::size_t j = 0; j < a.equations[i].rules.size(); ++j)
      EXPECT_EQ(a.equations[i].rules[j].rhs, b.equations[i].rules[j].rhs);
  }
  ASSERT_EQ(a.connections.size(), b.connections.size());
  for (std::size_t i = 0; i < a.connections.size(); ++i) {
    EXPECT_EQ(a.connections[i].name, b.connections[i].name);
    EXPECT_EQ(a.connections[i].order, b.connections[i].order);
    EXPECT_EQ(a.connections[i].coefficients, b.connections[i].coefficients);
  }
  ASSERT_EQ(a.lagrangians.size(), b.lagrangians.size());
  for (std::size_t i = 0; i < a.lagrangians.size(); ++i) {
    EXPECT_EQ(a.lagrangians[i].density, b.lagrangians[i].density);
    EXPECT_EQ(a.lagrangians[i].solve_for, b.lagrangians[i].solve_for);
  }
  ASSERT_EQ(a.momenta.size(), b.momenta.size());
  for (std::size_t i = 0; i < a.momenta.size(); ++i) EXPECT_EQ(a.momenta[i].values, b.momenta[i].values);
  ASSERT_EQ(a.lie_fields.size(), b.lie_fields.size());
  for (std::size_t i = 0; i < a.lie_fields.size(); ++i) {
    EXPECT_EQ(a.lie_fields[i].field.X, b.lie_fields[i].field.X);
    EXPECT_EQ(a.lie_fields[i].field.Y, b.lie_fields[i].field.Y);
  }
  ASSERT_EQ(a.solutions.size(), b.solutions.size());
  for (std::size_t i = 0; i < a.solutions.size(); ++i) EXPECT_EQ(a.solutions[i].u, b.solutions[i].u);
  EXPECT_EQ(a.parameter_values(), b.parameter_values());
}

class FixtureRoundTrip : public ::testing::TestWithParam<const char*> {};

TEST_P(FixtureRoundTrip, RenderThenParse) {
  auto p = load_problem(fixture(GetParam()));
  auto text = render_problem(p);
  auto q = parse_problem(text);
  expect_same(p, q);
  EXPECT_EQ(render_problem(q), text);
}

INSTANTIATE_TEST_SUITE_P(Fixtures, FixtureRoundTrip,
                         ::testing::Values("burgers.hjk", "heat.hjk", "kdv.hjk", "boussinesq.hjk", "oscillator.hjk"));

TEST(Problem, BurgersShape) {
  auto p = load_problem(fixture("burgers.hjk"));
  EXPECT_EQ(p.equations.size(), 1u);
  EXPECT_EQ(p.connection("nabla").order, 0);
  EXPECT_EQ(p.parameter_values().at("x0"), Rational(1));
}

SourceLoc error_at(const std::string& text, std::string* msg = nullptr) {
  try {
    parse_problem(text);
  } catch (const ProblemError& e) {
    if (msg) *msg = e.message();
    return e.where();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return {};
}

const char* kHead = "bundle b {\n  base t, x\n  dependent u\n}\n";

TEST(Problem, DuplicateNamesReportBothLocations) {
  std::string msg;
  auto at = error_at(std::string(kHead) + "equation e { u_t = u_xx }\nequation e { u_t = u }\n", &msg);
  EXPECT_EQ(at.line, 6);
  EXPECT_EQ(at.column, 1);
  EXPECT_NE(msg.find("5:1"), std::string::npos) << msg;
}

TEST(Problem, OrderMismatch) {
  std::string msg;
  auto at = error_at(std::string(kHead) + "connection c {\n  order 0\n  u_t = u_xx\n  u_x = u\n}\n", &msg);
  EXPECT_EQ(at.line, 7);
  EXPECT_NE(msg.find("order mismatch"), std::string::npos) << msg;
  error_at(std::string(kHead) + "connection c {\n  order 0\n  u_tx = u\n}\n", &msg);
  EXPECT_NE(msg.find("order mismatch"), std::string::npos) << msg;
}

TEST(Problem, SyntaxAndReferenceErrors) {
  std::string msg;
  auto at = error_at(std::string(kHead) + "equation e {\n  u_t = u_x +\n}\n", &msg);
  EXPECT_EQ(at.line, 6);
  EXPECT_EQ(at.column, 14);
  at = error_at(std::string(kHead) + "equation e {\n  u_t = y*u\n}\n", &msg);
  EXPECT_EQ(at.line, 6);
  EXPECT_EQ(at.column, 9);
  EXPECT_NE(msg.find("'y'"), std::string::npos);
  at = error_at("bundle b {\n  base t\n  dependent u\n", &msg);
  EXPECT_EQ(at.line, 1);
  at = error_at(std::string(kHead) + "widget w { }\n", &msg);
  EXPECT_EQ(at.line, 5);
  error_at(std::string(kHead) + "connection c {\n  u_t = u\n}\n", &msg);
  EXPECT_NE(msg.find("u_x"), std::string::npos) << msg;
}

TEST(Problem, BindParameters) {
  auto p = bind_parameters(load_problem(fixture("burgers.hjk")), {{"x0", Rational(1)}});
  EXPECT_EQ(p.connection("nabla").coefficients.at({0, {0, 1}}), p.bundle->parse("u/(x - 1)"));
  EXPECT_THROW(bind_parameters(p, {{"zz", Rational(1)}}), std::invalid_argument);
}

}  // namespace
}  // namespace hjkit
