#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fastdiff/error.hpp"
#include "fastdiff/expr.hpp"

using namespace fastdiff;

namespace {

double central(const Expr& e, const std::string& v, Point p, double h = 1e-5) {
  const double x0 = p[v];
  p[v] = x0 + h;
  const double fp = eval(e, p);
  p[v] = x0 - h;
  const double fm = eval(e, p);
  return (fp - fm) / (2 * h);
}

}  // namespace

TEST(Expr, ConstantFolding) {
  const Expr x = var("x");
  EXPECT_TRUE((constant(2.0) + constant(3.0)).is_constant(5.0));
  EXPECT_EQ((x * 1.0).id(), x.id());
  EXPECT_EQ((x + 0.0).id(), x.id());
  EXPECT_TRUE((x * 0.0).is_constant(0.0));
  EXPECT_TRUE(differentiate(constant(4.0), "x").is_constant(0.0));
  EXPECT_TRUE(differentiate(var("y"), "x").is_constant(0.0));
}

TEST(Expr, ParsesPrefixFormAndEvaluates) {
  const Expr e = parse_sexpr("(add (pow (var x) 2) (neg (pow (var y) 2)))");
  EXPECT_DOUBLE_EQ(eval(e, {{"x", 1.5}, {"y", 0.5}}), 2.0);
  EXPECT_EQ(free_variables(e), (std::set<std::string>{"x", "y"}));
}

TEST(Expr, SexprRoundTrip) {
  const Expr x = var("x"), y = var("y");
  const Expr e = sin(x * y) + exp(x) / (1.0 + square(y)) - coth(x + 2.0) * sech(y) +
                 sqrt(abs(x) + 1.0) + acos(tanh(y)) + pow(x + 3.0, y);
  const Expr back = parse_sexpr(to_sexpr(e));
  EXPECT_EQ(to_sexpr(back), to_sexpr(e));
  const Point p{{"x", 0.3}, {"y", -0.7}};
  EXPECT_DOUBLE_EQ(eval(back, p), eval(e, p));
}

TEST(Expr, MalformedTextIsParseError) {
  EXPECT_THROW(parse_sexpr("(add (var x)"), ParseError);
  EXPECT_THROW(parse_sexpr("(frobnicate (var x))"), ParseError);
  EXPECT_THROW(parse_sexpr("(pow (var x) two)"), ParseError);
  EXPECT_THROW(parse_sexpr("(var x) trailing"), ParseError);
}

TEST(Expr, DerivativesMatchCentralDifferences) {
  const Expr x = var("x"), y = var("y");
  const std::vector<Expr> cases = {
      sin(x * y) + cos(x) * tan(y),   exp(x * x - y) / (2.0 + sinh(y)), ln(1.0 + x * x) * cosh(y),
      coth(x + 3.0) + sec(y) * sech(x), asin(x / 3.0) + acos(y / 4.0),  sqrt(2.0 + x) * abs(y - 2.0),
      pow(x + 2.0, y), tanh(x * y) / (1.0 + x * x),
  };
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-0.8, 0.8);
  for (const auto& e : cases) {
    for (int i = 0; i < 20; ++i) {
      const Point p{{"x", d(rng)}, {"y", d(rng)}};
      for (const char* v : {"x", "y"}) {
        const double exact = eval(differentiate(e, v), p);
        EXPECT_NEAR(exact, central(e, v, p), 1e-6 * (1.0 + std::fabs(exact))) << to_sexpr(e);
      }
    }
  }
}

TEST(Expr, MixedPartialsCommute) {
  const Expr x = var("x"), y = var("y");
  const Expr e = sin(x * y) * exp(y) / (2.0 + cos(x)) + ln(3.0 + x * y * y);
  const Expr xy = differentiate(differentiate(e, "x"), "y");
  const Expr yx = differentiate(differentiate(e, "y"), "x");
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const Point p{{"x", d(rng)}, {"y", d(rng)}};
    EXPECT_NEAR(eval(xy, p), eval(yx, p), 1e-12);
  }
}

TEST(Expr, SingularEvaluationNamesSubexpression) {
  const Expr e = 1.0 + ln(var("x"));
  try {
    eval(e, {{"x", -1.0}});
    FAIL() << "expected SingularEvaluation";
  } catch (const SingularEvaluation& err) {
    EXPECT_NE(err.subexpression().find("ln"), std::string::npos);
  }
  EXPECT_THROW(eval(1.0 / var("x"), {{"x", 0.0}}), SingularEvaluation);
  EXPECT_THROW(eval(sqrt(var("x")), {{"x", -1.0}}), SingularEvaluation);
  EXPECT_THROW(eval(acos(var("x")), {{"x", 1.5}}), SingularEvaluation);
  EXPECT_THROW(eval(coth(var("x")), {{"x", 0.0}}), SingularEvaluation);
  EXPECT_THROW(eval(exp(var("x")), {{"x", 1e6}}), SingularEvaluation);
}

TEST(Expr, UnboundVariableIsUsageError) {
  EXPECT_THROW(eval(var("x") + var("y"), {{"x", 1.0}}), UsageError);
}

TEST(Expr, SubstitutionAndCompiledTapeAgree) {
  const Expr x = var("x"), y = var("y");
  const Expr e = square(x) * sin(y) + square(x) * sin(y) + x;
  const Expr s = substitute(e, {{"x", y + 1.0}});
  EXPECT_EQ(free_variables(s), std::set<std::string>{"y"});
  EXPECT_DOUBLE_EQ(eval(s, {{"y", 0.4}}), eval(e, {{"x", 1.4}, {"y", 0.4}}));
  const CompiledExpr c(e);
  EXPECT_DOUBLE_EQ(c({{"x", 0.2}, {"y", 0.9}}), eval(e, {{"x", 0.2}, {"y", 0.9}}));
  EXPECT_LE(c.size(), node_count(e));
}

TEST(Expr, ApplyNodeDifferentiatesThroughOrders) {
  struct Cubic : UnaryFunction {
    std::string name() const override { return "cubic"; }
    int max_order() const override { return 3; }
    double evaluate(int order, double x) const override {
      switch (order) {
        case 0: return x * x * x;
        case 1: return 3 * x * x;
        case 2: return 6 * x;
        default: return 6.0;
      }
    }
  };
  const auto fn = std::make_shared<Cubic>();
  const Expr x = var("x");
  const Expr e = fastdiff::apply(fn, 2.0 * x);
  const Expr d2 = differentiate(differentiate(e, "x"), "x");
  EXPECT_DOUBLE_EQ(eval(d2, {{"x", 0.5}}), 48.0 * 0.5);
  EXPECT_THROW(fastdiff::apply(fn, x, 4), UsageError);
  EXPECT_THROW(parse_sexpr(to_sexpr(e)), ParseError);
}

TEST(Expr, DeepChainCompilesWithoutRecursionLimits) {
  Expr e = var("x");
  for (int i = 0; i < 5000; ++i) e = e + var("x") * 0.5;
  const CompiledExpr c(e);
  EXPECT_NEAR(c({{"x", 2.0}}), 2.0 + 5000.0, 1e-6);
}
