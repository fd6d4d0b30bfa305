#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fastdiff/expr.hpp"
#include "fastdiff/field.hpp"

namespace fastdiff {

/// Uniform nodes lo = x_0 < ... < x_{n-1} = hi.
struct Grid1D {
  Interval range;
  std::size_t n = 0;
  std::vector<double> values;

  Grid1D() = default;
  Grid1D(Interval r, std::size_t nodes);

  double h() const { return range.width() / static_cast<double>(n - 1); }
  double node(std::size_t i) const { return range.lo + h() * static_cast<double>(i); }
};

/// Uniform tensor grid; values are stored row-major with y outer, x inner.
struct Grid2D {
  Interval x;
  Interval y;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> values;

  Grid2D() = default;
  Grid2D(Interval xr, Interval yr, std::size_t nx_nodes, std::size_t ny_nodes);

  double hx() const { return x.width() / static_cast<double>(nx - 1); }
  double hy() const { return y.width() / static_cast<double>(ny - 1); }
  double x_at(std::size_t i) const { return x.lo + hx() * static_cast<double>(i); }
  double y_at(std::size_t j) const { return y.lo + hy() * static_cast<double>(j); }
  std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }
  double& at(std::size_t i, std::size_t j) { return values[index(i, j)]; }
  double at(std::size_t i, std::size_t j) const { return values[index(i, j)]; }
  bool on_boundary(std::size_t i, std::size_t j) const {
    return i == 0 || j == 0 || i + 1 == nx || j + 1 == ny;
  }
};

enum class TimeScheme { CrankNicolson, ImplicitEuler };

struct SolverConfig {
  double dt = 0.0;
  double t0 = 0.0;
  double t_final = 0.0;
  double newton_tol = 1e-10;
  int max_newton = 25;
  TimeScheme scheme = TimeScheme::CrankNicolson;
  /// Keep every time level in the returned trajectory.
  bool store_trajectory = false;

  /// Throws ParameterError unless dt > 0, t_final >= t0, tolerance > 0 and
  /// max_newton >= 1.
  void validate() const;
};

template <class Grid>
struct Trajectory {
  std::vector<double> times;
  std::vector<Grid> states;  // every level when stored, otherwise the last one
  int steps = 0;
  int max_newton_iterations = 0;

  const Grid& final_state() const { return states.back(); }
};

using Trajectory1D = Trajectory<Grid1D>;
using Trajectory2D = Trajectory<Grid2D>;

/// v_t = (ln v)_ee on `range` with Dirichlet data and initial values from
/// `exact`, a field over (e, t). Time steps are taken on s = ln v.
Trajectory1D solve_fast1d(const Field& exact, Interval range, std::size_t nodes,
                          const SolverConfig& config);

/// u_t = f Lap ln u - lambda u on a box. Boundary data come from `exact`, a
/// field over (x, y) or (x, y, t); `initial` replaces the exact initial
/// values when given.
struct Fast2dProblem {
  Field exact;
  Interval x;
  Interval y;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::optional<Expr> weight;
  double sink = 0.0;
  std::optional<Grid2D> initial;
};

Trajectory2D solve_fast2d(const Fast2dProblem& problem, const SolverConfig& config);

struct LiouvilleProblem {
  double lambda = 1.0;
  std::optional<Expr> source;
  /// Boundary data over (x, y).
  Field boundary;
  Interval x;
  Interval y;
  std::size_t nx = 0;
  std::size_t ny = 0;
  double newton_tol = 1e-10;
  int max_newton = 25;
};

struct LiouvilleResult {
  Grid2D solution;
  int iterations = 0;
  /// Max-norm of the discrete residual before each iteration and at exit.
  std::vector<double> residual_history;
};

/// Damped Newton on the five-point discretization of Lap w = source e^{lambda w}.
LiouvilleResult solve_liouville(const LiouvilleProblem& problem);

/// Linear interpolation of the boundary of `g` into its interior, blending
/// both directions.
void fill_interior_from_boundary(Grid2D& g);

// ---------------------------------------------------------------------------
// ODE system  f'' = e^f + A phi'^2,  psi'' = e^psi - B phi'^2,  phi'' = e^psi - e^f

struct ChargeTransferState {
  double f = 0.0, df = 0.0;
  double psi = 0.0, dpsi = 0.0;
  double phi = 0.0, dphi = 0.0;
};

struct ChargeTransferParams {
  double A = 0.0;
  double B = 0.0;
};

ChargeTransferState charge_transfer_rhs(const ChargeTransferState& s,
                                        const ChargeTransferParams& p);

struct OdeTrajectory {
  std::vector<double> eta;
  std::vector<ChargeTransferState> states;
  /// Set when a component exceeded 1e10 in magnitude; the trajectory stops there.
  std::optional<double> blow_up_at;
};

/// Classic fourth-order Runge-Kutta from eta_range.lo to eta_range.hi; the
/// step is shrunk so that it divides the range.
OdeTrajectory integrate_charge_transfer_ode(const ChargeTransferState& initial,
                                            const ChargeTransferParams& params,
                                            Interval eta_range, double step);

/// Scalar second-order ODE y'' = g(y) integrated by RK4 on a uniform grid.
struct ScalarOdeTrajectory {
  std::vector<double> eta;
  std::vector<double> y;
  std::vector<double> dy;
  std::optional<double> blow_up_at;
};

ScalarOdeTrajectory integrate_second_order(const std::function<double(double)>& g, double y0,
                                           double dy0, Interval eta_range, double step);

/// Piecewise quintic Hermite interpolant of tabulated value, first and
/// second derivative, usable as an Apply node up to order 2.
class HermiteTable : public UnaryFunction {
 public:
  HermiteTable(std::string name, std::vector<double> nodes, std::vector<double> y,
               std::vector<double> dy, std::vector<double> d2y);

  std::string name() const override { return name_; }
  int max_order() const override { return 2; }
  double evaluate(int order, double x) const override;

 private:
  std::string name_;
  std::vector<double> nodes_, y_, dy_, d2y_;
};

struct ChargeTransferProfiles {
  std::shared_ptr<const HermiteTable> f, psi, phi;
};

/// Interpolants of the three components, second derivatives taken from the
/// ODE right-hand side at each node.
ChargeTransferProfiles tabulate(const OdeTrajectory& traj, const ChargeTransferParams& params);

// ---------------------------------------------------------------------------
// Errors against exact fields and convergence studies

/// Max |numeric - exact| over all nodes (interior only when `interior_only`).
/// Throws DomainError when the exact field is singular at a node.
double max_error(const Grid1D& g, const Field& exact, double t);
double max_error(const Grid2D& g, const Field& exact, std::optional<double> t,
                 bool interior_only = true);

/// Samples `exact` (over (x,y) or (x,y,t)) on the nodes of a grid.
Grid2D sample(const Field& exact, Interval x, Interval y, std::size_t nx, std::size_t ny,
              std::optional<double> t);

struct ConvergenceReport {
  std::vector<double> h;
  std::vector<double> errors;
  /// log(e_i / e_{i+1}) / log(h_i / h_{i+1}) for each refinement pair.
  std::vector<double> orders;
  /// Indices of pairs whose order lies outside the accepted band.
  std::vector<std::size_t> flagged;
  double band_lo = 1.5;
  double band_hi = 2.5;

  bool ok() const { return flagged.empty(); }
};

nlohmann::json to_json(const ConvergenceReport& r);

/// Evaluates `error_at(level)` for each grid spacing and tabulates observed orders.
/// Each spacing must halve the previous one (relative tolerance 1e-9).
ConvergenceReport convergence_study(const std::vector<double>& spacings,
                                    const std::function<double(std::size_t level)>& error_at,
                                    double band_lo = 1.5, double band_hi = 2.5);

}  // namespace fastdiff
