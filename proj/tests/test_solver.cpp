#include <cmath>

#include <gtest/gtest.h>

#include "fastdiff/catalog.hpp"
#include "fastdiff/error.hpp"
#include "fastdiff/harmonic.hpp"
#include "fastdiff/solver.hpp"
#include "fastdiff/verify.hpp"

using namespace fastdiff;

namespace {

const Field& trig_sh_reference() {
  static const Field f = one_dim_family(Family::TrigSh, 1.0, 0.0, 1.0).field;
  return f;
}

double fast1d_error(std::size_t n, TimeScheme scheme, double dt_scale, double h_power) {
  SolverConfig c;
  const double h = 2.0 / static_cast<double>(n - 1);
  c.dt = dt_scale * std::pow(h, h_power);
  c.t0 = 0.5;
  c.t_final = 1.0;
  c.scheme = scheme;
  return max_error(solve_fast1d(trig_sh_reference(), {-1.0, 1.0}, n, c).final_state(),
                   trig_sh_reference(), 1.0);
}

}  // namespace

TEST(Grid, Geometry) {
  Grid2D g({0.0, 1.0}, {-1.0, 1.0}, 5, 3);
  EXPECT_DOUBLE_EQ(g.hx(), 0.25);
  EXPECT_DOUBLE_EQ(g.hy(), 1.0);
  EXPECT_EQ(g.index(2, 1), 7u);
  EXPECT_TRUE(g.on_boundary(0, 1));
  EXPECT_FALSE(g.on_boundary(2, 1));
  EXPECT_THROW(Grid2D({0.0, 1.0}, {0.0, 1.0}, 2, 5), ParameterError);
  EXPECT_THROW(Grid1D({1.0, 0.0}, 5), ParameterError);
}

TEST(Fast1d, ZeroStepsIsIdentity) {
  SolverConfig c{.dt = 0.01, .t0 = 0.5, .t_final = 0.5};
  const auto traj = solve_fast1d(trig_sh_reference(), {-1.0, 1.0}, 33, c);
  EXPECT_EQ(traj.steps, 0);
  EXPECT_LT(max_error(traj.final_state(), trig_sh_reference(), 0.5), 1e-15);
}

TEST(Fast1d, SecondOrderConvergence) {
  std::vector<double> errors;
  for (std::size_t n : {65u, 129u, 257u}) errors.push_back(fast1d_error(n, TimeScheme::CrankNicolson, 1.0, 2.0));
  const auto rep = convergence_study({2.0 / 64, 2.0 / 128, 2.0 / 256},
                                     [&](std::size_t i) { return errors[i]; }, 1.7, 2.3);
  EXPECT_TRUE(rep.ok()) << to_json(rep).dump();
  EXPECT_LT(errors.back(), 1e-4);
}

TEST(Fast1d, FirstOrderVariantIsDetected) {
  std::vector<double> errors;
  for (std::size_t n : {33u, 65u, 129u}) errors.push_back(fast1d_error(n, TimeScheme::ImplicitEuler, 1.0, 1.0));
  const auto rep = convergence_study({2.0 / 32, 2.0 / 64, 2.0 / 128},
                                     [&](std::size_t i) { return errors[i]; });
  EXPECT_FALSE(rep.ok());
  for (double p : rep.orders) EXPECT_NEAR(p, 1.0, 0.3);
}

TEST(Fast1d, PositivityAndInputErrors) {
  SolverConfig c{.dt = 1e-3, .t0 = 0.5, .t_final = 0.6, .store_trajectory = true};
  const auto traj = solve_fast1d(trig_sh_reference(), {-1.0, 1.0}, 33, c);
  EXPECT_EQ(traj.states.size(), static_cast<std::size_t>(traj.steps + 1));
  for (const auto& g : traj.states)
    for (double v : g.values) EXPECT_GT(v, 0.0);
  const Field negative(var("eta") - 0.5 + 0.0 * var("t"), {"eta", "t"});
  EXPECT_THROW(solve_fast1d(negative, {-1.0, 1.0}, 17, c), DomainError);
  SolverConfig bad = c;
  bad.dt = 0.0;
  EXPECT_THROW(solve_fast1d(trig_sh_reference(), {-1.0, 1.0}, 17, bad), ParameterError);
}

TEST(Fast1d, NewtonFailureCarriesTrace) {
  SolverConfig c{.dt = 1e-2, .t0 = 0.5, .t_final = 0.6, .newton_tol = 1e-300, .max_newton = 2};
  try {
    solve_fast1d(trig_sh_reference(), {-1.0, 1.0}, 17, c);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_NE(std::string(e.what()).find("residual history"), std::string::npos);
  }
}

TEST(Fast2d, ConstantStateIsEquilibrium) {
  Fast2dProblem p{Field(constant(2.5) + 0.0 * var("t"), {"x", "y", "t"}), {0.0, 1.0}, {0.0, 1.0}, 9, 9};
  SolverConfig c{.dt = 0.1, .t0 = 0.0, .t_final = 1.0};
  const auto traj = solve_fast2d(p, c);
  for (double v : traj.final_state().values) EXPECT_NEAR(v, 2.5, 1e-13);
}

TEST(Fast2d, ConvergesToPlanarSolution) {
  const auto& e = Catalog::standard().at("planar.tan_tanh");
  std::vector<double> errors, hs;
  for (std::size_t n : {9u, 17u, 33u}) {
    Fast2dProblem p{e.field, {0.1, 0.6}, {0.1, 0.6}, n, n};
    const double h = 0.5 / static_cast<double>(n - 1);
    SolverConfig c{.dt = h, .t0 = 0.5, .t_final = 1.0};
    const auto traj = solve_fast2d(p, c);
    for (double v : traj.final_state().values) ASSERT_GT(v, 0.0);
    errors.push_back(max_error(traj.final_state(), e.field, 1.0));
    hs.push_back(h);
  }
  const auto rep = convergence_study(hs, [&](std::size_t i) { return errors[i]; });
  EXPECT_TRUE(rep.ok()) << to_json(rep).dump();
}

TEST(Fast2d, WeightedEquationConverges) {
  const auto& e = Catalog::standard().at("weighted.exp_quadratic");
  std::vector<double> errors, hs;
  for (std::size_t n : {9u, 17u, 33u}) {
    Fast2dProblem p{e.field, {0.2, 0.7}, {0.2, 0.7}, n, n, e.weight};
    const double h = 0.5 / static_cast<double>(n - 1);
    SolverConfig c{.dt = 0.5 * h, .t0 = 0.5, .t_final = 0.75};
    errors.push_back(max_error(solve_fast2d(p, c).final_state(), e.field, 0.75));
    hs.push_back(h);
  }
  const auto rep = convergence_study(hs, [&](std::size_t i) { return errors[i]; });
  EXPECT_TRUE(rep.ok()) << to_json(rep).dump();
}

TEST(Liouville, SingleInteriorUnknown) {
  const auto e = liouville_solutions(1.0, 1.0, var("y"), LiouvilleKind::Sec);
  LiouvilleProblem p{.lambda = 1.0, .boundary = e.field, .x = {0.0, 1.0}, .y = {-0.5, 0.5}, .nx = 3, .ny = 3};
  const auto r = solve_liouville(p);
  const auto& g = r.solution;
  const double h2 = 0.25;
  const double lap = (g.at(0, 1) + g.at(2, 1) + g.at(1, 0) + g.at(1, 2) - 4 * g.at(1, 1)) / h2;
  EXPECT_NEAR(lap, std::exp(g.at(1, 1)), 1e-10);
}

TEST(Liouville, SecondOrderAndMonotoneNewton) {
  const auto e = liouville_solutions(1.0, 1.0, var("y"), LiouvilleKind::Sec);
  std::vector<double> errors, hs;
  for (std::size_t n : {17u, 33u, 65u}) {
    LiouvilleProblem p{.lambda = 1.0, .boundary = e.field, .x = {0.0, 1.0}, .y = {-0.5, 0.5}, .nx = n, .ny = n};
    const auto r = solve_liouville(p);
    EXPECT_LE(r.iterations, 8);
    EXPECT_LE(r.residual_history.back(), 1e-10);
    for (std::size_t i = 1; i < r.residual_history.size(); ++i) {
      EXPECT_LT(r.residual_history[i], r.residual_history[i - 1]);
    }
    errors.push_back(max_error(r.solution, e.field, std::nullopt));
    hs.push_back(1.0 / static_cast<double>(n - 1));
  }
  const auto rep = convergence_study(hs, [&](std::size_t i) { return errors[i]; }, 1.7, 2.3);
  EXPECT_TRUE(rep.ok()) << to_json(rep).dump();
}

TEST(Liouville, HarmonicSourceConverges) {
  const Expr eta = 2.0 * var("x") * var("y");
  const auto e = liouville_inhomogeneous_solution(1.0, eta);
  std::vector<double> errors, hs;
  for (std::size_t n : {9u, 17u, 33u}) {
    LiouvilleProblem p{.lambda = 1.0, .source = eta, .boundary = e.field, .x = {0.5, 1.0},
                       .y = {0.5, 1.0}, .nx = n, .ny = n};
    errors.push_back(max_error(solve_liouville(p).solution, e.field, std::nullopt));
    hs.push_back(0.5 / static_cast<double>(n - 1));
  }
  const auto rep = convergence_study(hs, [&](std::size_t i) { return errors[i]; });
  EXPECT_TRUE(rep.ok()) << to_json(rep).dump();
}

TEST(Liouville, SingularBoundaryIsInputError) {
  const auto e = liouville_solutions(1.0, 1.0, var("y"), LiouvilleKind::Sec);
  // The top edge lies on the pole of sec(y).
  LiouvilleProblem p{.lambda = 1.0, .boundary = e.field, .x = {0.0, 1.0}, .y = {M_PI / 2 - 1.0, M_PI / 2},
                     .nx = 9, .ny = 9};
  EXPECT_THROW(solve_liouville(p), DomainError);
}

TEST(Liouville, SinkSteadyStateMatchesEllipticSolve) {
  const auto e = liouville_solutions(1.0, 1.0, var("y"), LiouvilleKind::Sec);
  const std::size_t n = 17;
  const Interval bx{0.0, 1.0}, by{-0.5, 0.5};
  LiouvilleProblem lp{.lambda = 1.0, .boundary = e.field, .x = bx, .y = by, .nx = n, .ny = n};
  const auto elliptic = solve_liouville(lp).solution;

  const Field u(exp(e.field.expr()), {"x", "y"}, e.field.singular_set());
  Grid2D start = sample(u, bx, by, n, n, std::nullopt);
  fill_interior_from_boundary(start);
  Fast2dProblem pp{u, bx, by, n, n, std::nullopt, 1.0, start};
  SolverConfig c{.dt = 0.25, .t0 = 0.0, .t_final = 20.0, .scheme = TimeScheme::ImplicitEuler};
  const auto steady = solve_fast2d(pp, c).final_state();
  double gap = 0.0;
  for (std::size_t k = 0; k < steady.values.size(); ++k) {
    gap = std::max(gap, std::fabs(std::log(steady.values[k]) - elliptic.values[k]));
  }
  EXPECT_LT(gap, 5e-3);
}

TEST(ChargeTransferOde, EqualProfilesKeepPhiAffine) {
  ChargeTransferState s0{.f = 0.1, .df = 0.2, .psi = 0.1, .dpsi = 0.2, .phi = 0.0, .dphi = 0.7};
  const auto traj = integrate_charge_transfer_ode(s0, {.A = 0.4, .B = -0.4}, {0.0, 1.0}, 1e-2);
  ASSERT_FALSE(traj.blow_up_at.has_value());
  for (const auto& s : traj.states) {
    EXPECT_LT(std::fabs(charge_transfer_rhs(s, {0.4, -0.4}).dphi), 1e-10);
    EXPECT_NEAR(s.dphi, 0.7, 1e-12);
  }
}

TEST(ChargeTransferOde, FourthOrderStepHalving) {
  ChargeTransferState s0{.f = 0.0, .df = 0.0, .psi = 0.2, .dpsi = 0.0, .phi = 0.0, .dphi = 0.5};
  const ChargeTransferParams p{.A = 0.5, .B = 0.3};
  auto end = [&](double h) { return integrate_charge_transfer_ode(s0, p, {0.0, 1.0}, h).states.back().f; };
  const double a = end(0.1), b = end(0.05), c = end(0.025);
  const double ratio = (a - b) / (b - c);
  EXPECT_GT(ratio, 14.0);
  EXPECT_LT(ratio, 18.0);
}

TEST(ChargeTransferOde, BlowUpStopsEarly) {
  ChargeTransferState s0{.f = 3.0, .df = 5.0};
  const auto traj = integrate_charge_transfer_ode(s0, {1.0, 1.0}, {0.0, 10.0}, 1e-3);
  ASSERT_TRUE(traj.blow_up_at.has_value());
  EXPECT_LT(*traj.blow_up_at, 10.0);
  EXPECT_NEAR(traj.eta.back() + 1e-3, *traj.blow_up_at, 1e-9);
  EXPECT_THROW(integrate_charge_transfer_ode(s0, {}, {0.0, 1.0}, 0.0), ParameterError);
}

TEST(ChargeTransferOde, ScalarIntegratorMatchesClosedForm) {
  const auto traj = integrate_second_order([](double y) { return -y; }, 0.0, 1.0, {0.0, 2.0}, 1e-3);
  EXPECT_NEAR(traj.y.back(), std::sin(2.0), 1e-11);
  EXPECT_NEAR(traj.dy.back(), std::cos(2.0), 1e-11);
}

TEST(HermiteTable, ReproducesQuinticsExactly) {
  auto q = [](double x) { return 1 - 2 * x + 0.5 * x * x * x - 0.3 * std::pow(x, 5); };
  auto dq = [](double x) { return -2 + 1.5 * x * x - 1.5 * std::pow(x, 4); };
  auto d2q = [](double x) { return 3 * x - 6 * std::pow(x, 3); };
  std::vector<double> nodes, y, dy, d2y;
  for (int i = 0; i <= 4; ++i) {
    const double x = -1.0 + 0.5 * i;
    nodes.push_back(x), y.push_back(q(x)), dy.push_back(dq(x)), d2y.push_back(d2q(x));
  }
  const HermiteTable t("q", nodes, y, dy, d2y);
  for (double x : {-0.9, -0.2, 0.33, 0.77}) {
    EXPECT_NEAR(t.evaluate(0, x), q(x), 1e-13);
    EXPECT_NEAR(t.evaluate(1, x), dq(x), 1e-12);
    EXPECT_NEAR(t.evaluate(2, x), d2q(x), 1e-11);
  }
  EXPECT_TRUE(std::isnan(t.evaluate(0, 1.5)));
}

TEST(Convergence, LadderValidation) {
  auto err = [](std::size_t i) { return std::pow(0.5, 2.0 * static_cast<double>(i)); };
  EXPECT_THROW(convergence_study({0.1}, err), ParameterError);
  EXPECT_THROW(convergence_study({0.1, 0.03}, err), ParameterError);
  EXPECT_THROW(convergence_study({0.1, 0.05}, [](std::size_t) { return 0.0; }), DomainError);
  const auto rep = convergence_study({0.1, 0.05, 0.025}, err);
  ASSERT_EQ(rep.orders.size(), 2u);
  EXPECT_NEAR(rep.orders[0], 2.0, 1e-12);
  EXPECT_TRUE(rep.ok());
}

TEST(Convergence, SingularExactFieldIsInputError) {
  Grid2D g({-1.0, 1.0}, {-1.0, 1.0}, 5, 5);
  const auto seed = Catalog::standard().at("planar.cubic");
  EXPECT_THROW(max_error(g, seed.field, 1.0, false), DomainError);
}
