#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fastdiff/catalog.hpp"
#include "fastdiff/error.hpp"
#include "fastdiff/transform.hpp"
#include "fastdiff/verify.hpp"

using namespace fastdiff;

namespace {

/// Max relative pointwise gap between two fields over (x, y, t), skipping
/// points where either is singular.
double max_gap(const Field& a, const Field& b, const Box& box, int n, std::uint64_t seed) {
  BoxSampler s(box, seed);
  double worst = 0.0;
  int used = 0;
  for (int i = 0; i < n; ++i) {
    const Point p = s.next();
    if (a.singular_set().contains(p, 1e-2) || b.singular_set().contains(p, 1e-2)) continue;
    const double va = a.value(p), vb = b.value(p);
    worst = std::max(worst, std::fabs(va - vb) / (1.0 + std::fabs(vb)));
    ++used;
  }
  EXPECT_GT(used, n / 2);
  return worst;
}

const Box kPlane = {{"x", {-1.0, 1.0}}, {"y", {-1.0, 1.0}}, {"t", {0.1, 2.0}}};

HarmonicPair sinh_pair() {
  const Expr x = var("x"), y = var("y");
  return harmonic_pair(pair_kind::Custom{sinh(x) * cos(y), cosh(x) * sin(y), {}, "sinh z"});
}

HarmonicPair cos_pair() {
  const Expr x = var("x"), y = var("y");
  return harmonic_pair(pair_kind::Custom{cos(x) * cosh(y), -(sin(x) * sinh(y)), {}, "cos z"});
}

}  // namespace

TEST(Branch, IdentityPairReproducesSeed) {
  const auto seed = base_seed();
  const Field u = branch(harmonic_pair(pair_kind::Monomial{1}), seed.field);
  BoxSampler s(kPlane, 4);
  for (int i = 0; i < 50; ++i) {
    const Point p = s.next();
    const Point q{{"xi", p.at("x")}, {"eta", p.at("y")}, {"t", p.at("t")}};
    const double v = seed.field.value(q);
    EXPECT_NEAR(u.value(p), v, 1e-12 * (1.0 + std::fabs(v)));
  }
}

TEST(Branch, SeedValueMatchesClosedForm) {
  const auto seed = base_seed();
  const double t = 1.0;
  EXPECT_NEAR(seed.field.value({{"xi", 1.0}, {"eta", 0.0}, {"t", t}}), 2.0 * std::tanh(t), 1e-15);
  const double th = std::tanh(0.7);
  EXPECT_NEAR(seed.field.value({{"xi", 0.5}, {"eta", 1.5}, {"t", 0.7}}),
              2.0 * th / (0.25 + 2.25 * th * th), 1e-14);
}

TEST(Branch, SinhAndCosPairsReproducePlanarEntries) {
  const auto& cat = Catalog::standard();
  const Box right = {{"x", {0.1, 1.5}}, {"y", {-1.2, 1.2}}, {"t", {0.1, 2.0}}};
  EXPECT_LT(max_gap(branch(sinh_pair(), base_seed().field), cat.at("planar.coth_tan").field, right,
                    200, 1),
            1e-12);
  EXPECT_LT(max_gap(branch(cos_pair(), base_seed().field), cat.at("planar.tan_tanh").field, kPlane,
                    200, 2),
            1e-12);
}

TEST(Branch, RebranchingTheTanTanhSolutionGivesCubicAndExponentialEntries) {
  const auto& cat = Catalog::standard();
  const Field seed = as_seed(cat.at("planar.tan_tanh").field);
  EXPECT_LT(max_gap(branch(harmonic_pair(pair_kind::Monomial{3}), seed),
                    cat.at("planar.cubic").field, cat.at("planar.cubic").domain, 300, 3),
            1e-10);
  EXPECT_LT(max_gap(branch(harmonic_pair(pair_kind::Exponential{3.0}), seed),
                    cat.at("planar.exp3").field, cat.at("planar.exp3").domain, 300, 4),
            1e-10);
  // The entry as printed differs from the re-branched field.
  EXPECT_GT(max_gap(branch(harmonic_pair(pair_kind::Exponential{3.0}), seed),
                    exp3_as_printed().field, cat.at("planar.exp3").domain, 300, 4),
            1e-2);
}

TEST(Branch, CubingTheBaseSeedDoesNotGiveTheCubicEntry) {
  const auto& cubic = Catalog::standard().at("planar.cubic");
  const Field direct = branch(harmonic_pair(pair_kind::Monomial{3}), base_seed().field);
  EXPECT_GT(max_gap(direct, cubic.field, cubic.domain, 200, 5), 1e-2);
  // It is nevertheless a solution.
  SampleSpec spec{cubic.domain, 300, 5};
  EXPECT_LT(fast_diffusion_residual(direct, spec).max_rel, 1e-7);
}

TEST(Branch, RandomPairsPreserveSolutions) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> c(-1.5, 1.5);
  std::uniform_int_distribution<int> n(1, 4);
  const auto seed = base_seed();
  for (int i = 0; i < 8; ++i) {
    HarmonicPair pair;
    switch (i % 4) {
      case 0: pair = harmonic_pair(pair_kind::Monomial{n(rng)}); break;
      case 1: pair = harmonic_pair(pair_kind::Exponential{0.5 + std::fabs(c(rng))}); break;
      case 2: pair = harmonic_pair(pair_kind::Affine{c(rng), c(rng), c(rng), c(rng)}); break;
      default:
        pair = compose(harmonic_pair(pair_kind::Monomial{2}),
                       harmonic_pair(pair_kind::Affine{c(rng), c(rng), c(rng), c(rng)}));
    }
    const Field u = branch(pair, seed.field);
    EXPECT_EQ(u.signature(), (std::vector<std::string>{"x", "y", "t"}));
    SampleSpec spec{kPlane, 200, static_cast<std::uint64_t>(i + 1)};
    EXPECT_LT(fast_diffusion_residual(u, spec).max_rel, 1e-7) << pair.description;
  }
}

TEST(Branch, RejectsSeedsOverTheWrongVariables) {
  EXPECT_THROW(branch(harmonic_pair(pair_kind::Monomial{2}), Catalog::standard().at("planar.cubic").field),
               UsageError);
}

TEST(Reduce, FamiliesComposedWithHarmonicFunctionsSolveThePlanarEquation) {
  const Expr x = var("x"), y = var("y");
  const std::vector<Expr> etas = {y, 2.0 * x * y, 4.0 * (pow(x, 3.0) * y - x * pow(y, 3.0))};
  for (const auto* entry : Catalog::standard().with_tag(EquationTag::Fast1d)) {
    for (const auto& eta : etas) {
      const Field u = reduce_via_harmonic(eta, entry->field);
      SampleSpec spec{{{"x", {-1.0, 1.0}}, {"y", {-1.0, 1.0}}, {"t", entry->domain.at("t")}}, 200, 3};
      EXPECT_LT(fast_diffusion_residual(u, spec).max_rel, 1e-7) << entry->id << " " << to_sexpr(eta);
    }
  }
}

TEST(Reduce, QuarticExampleMatchesClosedForm) {
  const Expr x = var("x"), y = var("y");
  const Field u = reduce_via_harmonic(4.0 * (pow(x, 3.0) * y - x * pow(y, 3.0)),
                                      one_dim_family(Family::TrigSh, 1.0, 0.5, 1.0).field);
  const double K = std::hypot(1.0, 0.5);
  BoxSampler s({{"x", {-1.0, 1.0}}, {"y", {-1.0, 1.0}}, {"t", {0.1, 2.0}}}, 8);
  for (int i = 0; i < 30; ++i) {
    const Point p = s.next();
    const double px = p.at("x"), py = p.at("y"), t = p.at("t");
    const double eta = 4 * (px * px * px * py - px * py * py * py);
    const double r2 = px * px + py * py;
    const double v = K * std::sinh(t) / (std::cos(eta) + 0.5 * std::sin(eta) + K * std::cosh(t));
    const double expected = 16.0 * r2 * r2 * r2 * v;
    EXPECT_NEAR(u.value(p), expected, 1e-12 * (1.0 + std::fabs(expected)));
  }
}

TEST(Reduce, ConstantHarmonicFunctionIsDegenerate) {
  EXPECT_THROW(reduce_via_harmonic(constant(2.0), one_dim_family(Family::TrigSh, 1, 0, 1).field),
               DegenerateInput);
}

TEST(Conformal, LiftSolvesTheWeightedEquationOnlyForItsWeight) {
  const Expr x = var("x"), y = var("y");
  const Expr f = exp(square(x) - square(y));
  const Field u = conformal_lift(f, one_dim_family(Family::TrigSh, 1.0, 0.5, 1.0).field);
  SampleSpec spec{{{"x", {-1.0, 1.0}}, {"y", {-1.0, 1.0}}, {"t", {0.1, 2.0}}}, 300, 2};
  EXPECT_LT(weighted_residual(u, f, spec).max_rel, 1e-7);
  EXPECT_GT(weighted_residual(u, exp(square(x) + square(y)), spec).max_rel, 1e-3);
  EXPECT_GT(fast_diffusion_residual(u, spec).max_rel, 1e-3);
}

TEST(Conformal, WeightPreconditions) {
  const Field v = one_dim_family(Family::TrigSh, 1.0, 0.0, 1.0).field;
  const Expr x = var("x"), y = var("y");
  EXPECT_THROW(conformal_lift(constant(2.0), v), DegenerateInput);
  EXPECT_THROW(conformal_lift(-exp(x), v), DomainError);
  EXPECT_THROW(conformal_lift(1.0 + square(x) + square(y), v), PreconditionError);
}

TEST(LiouvilleShift, PreservesSolutions) {
  const auto sec = liouville_solutions(1.0, 1.0, var("y"), LiouvilleKind::Sec);
  const Field seed = sec.field.rename({{"x", "xi"}, {"y", "eta"}});
  for (const auto& kind : std::vector<PairKind>{pair_kind::Exponential{1.0}, pair_kind::Monomial{2},
                                                pair_kind::Affine{0.5, 0.5, 0.1, 0.0}}) {
    const auto pair = harmonic_pair(kind);
    const Field w = liouville_shift(pair, seed, 1.0);
    SampleSpec spec{{{"x", {-1.0, 1.0}}, {"y", {-1.0, 1.0}}}, 300, 6};
    EXPECT_LT(liouville_residual(w, 1.0, std::nullopt, spec).max_rel, 1e-7) << pair.description;
  }
  EXPECT_THROW(liouville_shift(harmonic_pair(pair_kind::Monomial{1}), seed, 0.0), ParameterError);
}

TEST(LiftSystem, HomogeneousCouplingIsPreserved) {
  const Expr t = var("t");
  const std::vector<Field> v = {Field(1.0 + exp(-2.0 * t), {"xi", "eta", "t"}),
                                Field(1.0 - exp(-2.0 * t), {"xi", "eta", "t"})};
  const SourceTerm f{2, [](std::span<const double> u) {
                       return std::vector<double>{u[1] - u[0], u[0] - u[1]};
                     }};
  const auto pair = harmonic_pair(pair_kind::Exponential{1.0});
  const auto u = lift_system(pair, v, f);
  ASSERT_EQ(u.size(), 2u);
  SampleSpec spec{{{"x", {-1.0, 1.0}}, {"y", {-1.0, 1.0}}, {"t", {0.1, 2.0}}}, 200, 3};
  for (const auto& r : system_residual(u, f, spec)) EXPECT_LT(r.max_rel, 1e-9);
  // Dropping the coupling breaks the system.
  const SourceTerm none{2, [](std::span<const double>) { return std::vector<double>{0.0, 0.0}; }};
  double worst = 0.0;
  for (const auto& r : system_residual(u, none, spec)) worst = std::max(worst, r.max_rel);
  EXPECT_GT(worst, 1e-3);
}

TEST(LiftSystem, DiagonalSeedLiftsEachComponent) {
  const auto seed = base_seed();
  const std::vector<Field> v = {seed.field, seed.field};
  const SourceTerm zero{2, [](std::span<const double>) { return std::vector<double>{0.0, 0.0}; }};
  const auto u = lift_system(harmonic_pair(pair_kind::Monomial{2}), v, zero);
  SampleSpec spec{kPlane, 200, 4};
  for (const auto& r : system_residual(u, zero, spec)) EXPECT_LT(r.max_rel, 1e-7);
}

TEST(LiftSystem, NonHomogeneousSourceIsRejected) {
  const Expr t = var("t");
  const std::vector<Field> v = {Field(1.0 + t, {"xi", "eta", "t"})};
  const SourceTerm sq{1, [](std::span<const double> u) { return std::vector<double>{u[0] * u[0]}; }};
  EXPECT_THROW(lift_system(harmonic_pair(pair_kind::Monomial{1}), v, sq), PreconditionError);
  const double u[] = {2.0};
  EXPECT_NEAR(homogeneity_residual(sq, u, 3.0)[0], 36.0 - 12.0, 1e-12);
}
