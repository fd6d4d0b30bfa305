#include <cmath>

#include <gtest/gtest.h>

#include "fastdiff/catalog.hpp"
#include "fastdiff/error.hpp"
#include "fastdiff/verify.hpp"

using namespace fastdiff;

TEST(Sampler, DeterministicAndInsideBox) {
  const Box box = {{"a", {-1.0, 2.0}}, {"b", {5.0, 6.0}}};
  BoxSampler s1(box, 42), s2(box, 42), s3(box, 43);
  bool differs = false;
  for (int i = 0; i < 200; ++i) {
    const Point p = s1.next(), q = s2.next(), r = s3.next();
    EXPECT_EQ(p, q);
    differs = differs || p != r;
    EXPECT_GE(p.at("a"), -1.0);
    EXPECT_LT(p.at("a"), 2.0);
    EXPECT_GE(p.at("b"), 5.0);
    EXPECT_LT(p.at("b"), 6.0);
  }
  EXPECT_TRUE(differs);
  EXPECT_THROW(BoxSampler({{"a", {1.0, 1.0}}}, 1), UsageError);
}

TEST(FiniteDifference, KnownDerivatives) {
  const Field f(sin(var("x")), {"x"});
  EXPECT_NEAR(*fd_derivative_oracle(f, "x", 1, {{"x", 0.0}}, 1e-3), 1.0, 1e-8);
  EXPECT_NEAR(*fd_derivative_oracle(f, "x", 2, {{"x", 0.5}}, 1e-3), -std::sin(0.5), 1e-8);
  EXPECT_THROW(fd_derivative_oracle(f, "x", 3, {{"x", 0.0}}, 1e-3), UsageError);
}

TEST(FiniteDifference, SeedTimeDerivativeMatchesExactRule) {
  const auto seed = base_seed();
  const Point p{{"xi", 1.0}, {"eta", 0.0}, {"t", 1.0}};
  const double exact = seed.field.derivative({"t"}, p);
  const double fd = *fd_derivative_oracle(seed.field, "t", 1, p, 1e-4);
  EXPECT_LT(std::fabs(fd - exact) / std::fabs(exact), 1e-6);
}

TEST(FiniteDifference, StencilOnPoleIsSkipped) {
  SingularSet s;
  s.add_band("pole of tan", cos(var("x")));
  const Field f(tan(var("x")), {"x"}, s);
  EXPECT_FALSE(fd_derivative_oracle(f, "x", 1, {{"x", M_PI / 2 - 5e-5}}, 1e-4).has_value());
  EXPECT_TRUE(fd_derivative_oracle(f, "x", 1, {{"x", 0.3}}, 1e-4).has_value());
}

TEST(Oracles, ExactAndFiniteDifferenceRoutesAgree) {
  for (const auto& e : Catalog::standard().entries()) {
    const auto spec = default_spec(e, 300, 9);
    const auto exact = entry_residual(e, spec, Derivatives::Exact);
    const auto fd = entry_residual(e, spec, Derivatives::FiniteDifference);
    EXPECT_EQ(exact.max_rel < 1e-4, fd.max_rel < 1e-4) << e.id;
    const auto bad = perturbed(e, 1e-2);
    EXPECT_EQ(entry_residual(bad, spec, Derivatives::Exact).max_rel < 1e-4,
              entry_residual(bad, spec, Derivatives::FiniteDifference).max_rel < 1e-4)
        << e.id;
  }
}

TEST(Oracles, PerturbationRaisesResidual) {
  for (const auto& e : Catalog::standard().entries()) {
    const auto r = entry_residual(perturbed(e, 1e-2), default_spec(e, 500, 3));
    EXPECT_GT(r.max_abs, 5e-3) << e.id;
  }
}

TEST(Oracles, ReportsAreReproducible) {
  const auto& e = Catalog::standard().at("planar.cubic");
  const auto a = to_json(entry_residual(e, default_spec(e, 400, 17))).dump();
  const auto b = to_json(entry_residual(e, default_spec(e, 400, 17))).dump();
  const auto c = to_json(entry_residual(e, default_spec(e, 400, 18))).dump();
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(Oracles, AllSkippedIsEmptyReport) {
  const auto seed = base_seed();
  SampleSpec spec{{{"xi", {-1e-5, 1e-5}}, {"eta", {-1e-5, 1e-5}}, {"t", {0.5, 1.0}}}, 50, 1};
  EXPECT_THROW(fast_diffusion_residual(seed.field, spec), EmptyReport);
}

TEST(Oracles, SkippedSamplesAreCounted) {
  const auto& e = Catalog::standard().at("liouville.inhomogeneous");
  const auto r = entry_residual(e, default_spec(e, 400, 2));
  EXPECT_EQ(r.n_evaluated + r.n_skipped_singular, 400u);
  EXPECT_GT(r.n_skipped_singular, 0u);
}

TEST(Oracles, LiouvilleOfZeroIsMinusOne) {
  const Field zero(constant(0.0), {"x", "y"});
  SampleSpec spec{{{"x", {0.0, 1.0}}, {"y", {0.0, 1.0}}}, 20, 1};
  const auto r = liouville_residual(zero, 1.0, std::nullopt, spec);
  EXPECT_DOUBLE_EQ(r.max_abs, 1.0);
  EXPECT_DOUBLE_EQ(r.max_rel, 0.5);
}

TEST(Oracles, SinkResidual) {
  const auto& seed = Catalog::standard().at("planar.tan_tanh");
  const auto spec = default_spec(seed, 300, 1);
  EXPECT_EQ(to_json(sink_residual(seed.field, 0.0, spec)).dump(),
            to_json(fast_diffusion_residual(seed.field, spec)).dump());
  EXPECT_GT(sink_residual(seed.field, 0.7, spec).max_rel, 1e-3);
  // e^{lambda w} for a Liouville solution w is a steady state of the sink equation.
  const auto w = liouville_solutions(1.0, 1.0, var("y"), LiouvilleKind::Sec);
  const Field u(exp(w.field.expr()), {"x", "y", "t"}, w.field.singular_set());
  SampleSpec box{{{"x", {-1.0, 1.0}}, {"y", {-0.5, 0.5}}, {"t", {0.0, 1.0}}}, 300, 2};
  EXPECT_LT(sink_residual(u, 1.0, box).max_rel, 1e-7);
}

TEST(Oracles, ChargeTransferTrivialComponent) {
  const Expr x = var("x"), y = var("y");
  const Field u(x * y, {"x", "y"});
  const Field phi(square(x) - square(y), {"x", "y"});
  SampleSpec spec{{{"x", {-1.0, 1.0}}, {"y", {-1.0, 1.0}}}, 100, 1};
  const auto r = charge_transfer_residual(u, u, phi, 1.0, 2.0, spec);
  EXPECT_LT(r[2].max_abs, 1e-12);
  EXPECT_GT(r[0].max_abs, 1e-2);
}

TEST(Oracles, WrongVariablesAreUsageErrors) {
  const Field f(var("x"), {"x", "y"});
  SampleSpec spec{{{"x", {0.0, 1.0}}, {"y", {0.0, 1.0}}}, 10, 1};
  EXPECT_THROW(fast_diffusion_residual(f, spec), UsageError);
  const Field g(var("x"), {"x", "y", "t"});
  EXPECT_THROW(fast_diffusion_residual(g, spec), UsageError);
}
