#include "fastdiff/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fastdiff/error.hpp"

namespace fastdiff {

namespace {

constexpr double kBlowUp = 1e10;
/// Singular-set margin applied to solver nodes.
constexpr double kNodeMargin = 1e-10;

/// Square matrix with half-bandwidth b, factored in place without pivoting.
class BandedMatrix {
 public:
  BandedMatrix(std::size_t n, std::size_t b) : n_(n), b_(b), a_(n * (2 * b + 1), 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return a_[i * (2 * b_ + 1) + j + b_ - i]; }

  void factor() {
    for (std::size_t k = 0; k < n_; ++k) {
      const double pivot = (*this)(k, k);
      if (pivot == 0.0 || !std::isfinite(pivot)) throw SolverError("singular Newton Jacobian");
      const std::size_t last = std::min(n_ - 1, k + b_);
      for (std::size_t i = k + 1; i <= last; ++i) {
        double& lik = (*this)(i, k);
        if (lik == 0.0) continue;
        lik /= pivot;
        for (std::size_t j = k + 1; j <= last; ++j) (*this)(i, j) -= lik * (*this)(k, j);
      }
    }
  }

  void solve(std::vector<double>& x) {
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t first = i > b_ ? i - b_ : 0;
      for (std::size_t j = first; j < i; ++j) x[i] -= (*this)(i, j) * x[j];
    }
    for (std::size_t i = n_; i-- > 0;) {
      const std::size_t last = std::min(n_ - 1, i + b_);
      for (std::size_t j = i + 1; j <= last; ++j) x[i] -= (*this)(i, j) * x[j];
      x[i] /= (*this)(i, i);
    }
  }

 private:
  std::size_t n_, b_;
  std::vector<double> a_;
};

/// Solves a tridiagonal system in place; `rhs` becomes the solution.
void thomas(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper,
            std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

std::string trace(const std::vector<double>& history) {
  std::ostringstream os;
  os << "residual history:";
  for (double r : history) os << ' ' << r;
  return os.str();
}

bool has_time(const Field& f) {
  const auto& sig = f.signature();
  return std::find(sig.begin(), sig.end(), "t") != sig.end();
}

/// Evaluates an exact field at solver nodes, reporting singular samples as
/// input errors.
class ExactSampler {
 public:
  ExactSampler(const Field& f, std::size_t spatial_dims) : field_(f), time_(has_time(f)) {
    for (const auto& v : f.signature()) {
      if (v != "t") names_.push_back(v);
    }
    if (names_.size() != spatial_dims) {
      throw UsageError("exact field must have " + std::to_string(spatial_dims) +
                       " spatial variables");
    }
  }

  double operator()(double a, std::optional<double> b, std::optional<double> t) const {
    Point p;
    p[names_[0]] = a;
    if (b) p[names_[1]] = *b;
    if (time_) {
      if (!t) throw UsageError("exact field depends on t but no time was given");
      p["t"] = *t;
    }
    if (field_.singular_set().contains(p, kNodeMargin)) throw DomainError(message(p));
    try {
      return field_.value(p);
    } catch (const SingularEvaluation&) {
      throw DomainError(message(p));
    }
  }

  bool time_dependent() const { return time_; }

 private:
  std::string message(const Point& p) const {
    std::ostringstream os;
    os << "exact field is singular at";
    for (const auto& [k, v] : p) os << ' ' << k << '=' << v;
    return os.str();
  }

  const Field& field_;
  bool time_;
  std::vector<std::string> names_;
};

double positive_log(double u, double where) {
  if (!(u > 0.0)) {
    std::ostringstream os;
    os << "non-positive data " << u << " at node coordinate " << where;
    throw DomainError(os.str());
  }
  return std::log(u);
}

struct StepPlan {
  int steps;
  double dt;
};

StepPlan plan(const SolverConfig& c) {
  const double span = c.t_final - c.t0;
  if (span == 0.0) return {0, 0.0};
  const int n = std::max(1, static_cast<int>(std::ceil(span / c.dt - 1e-9)));
  return {n, span / n};
}

double theta(const SolverConfig& c) { return c.scheme == TimeScheme::CrankNicolson ? 0.5 : 1.0; }

}  // namespace

Grid1D::Grid1D(Interval r, std::size_t nodes) : range(r), n(nodes), values(nodes, 0.0) {
  if (nodes < 3) throw ParameterError("a 1D grid needs at least 3 nodes");
  if (!(r.hi > r.lo)) throw ParameterError("grid range must have positive width");
}

Grid2D::Grid2D(Interval xr, Interval yr, std::size_t nx_nodes, std::size_t ny_nodes)
    : x(xr), y(yr), nx(nx_nodes), ny(ny_nodes), values(nx_nodes * ny_nodes, 0.0) {
  if (nx < 3 || ny < 3) throw ParameterError("a 2D grid needs at least 3 nodes per axis");
  if (!(xr.hi > xr.lo) || !(yr.hi > yr.lo)) throw ParameterError("grid box must have positive width");
}

void SolverConfig::validate() const {
  if (!(dt > 0.0)) throw ParameterError("dt must be positive");
  if (!(t_final >= t0)) throw ParameterError("final time must not precede the initial time");
  if (!(newton_tol > 0.0)) throw ParameterError("Newton tolerance must be positive");
  if (max_newton < 1) throw ParameterError("max Newton iterations must be at least 1");
}

// ---------------------------------------------------------------------------

Trajectory1D solve_fast1d(const Field& exact, Interval range, std::size_t nodes,
                          const SolverConfig& config) {
  config.validate();
  const ExactSampler u(exact, 1);
  if (!u.time_dependent()) throw UsageError("solve_fast1d: exact field must depend on t");
  Grid1D grid(range, nodes);
  const std::size_t n = nodes;
  const double h2 = grid.h() * grid.h();
  const double th = theta(config);
  const auto [steps, dt] = plan(config);

  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid.values[i] = u(grid.node(i), std::nullopt, config.t0);
    s[i] = positive_log(grid.values[i], grid.node(i));
  }

  Trajectory1D out;
  out.times.push_back(config.t0);
  out.states.push_back(grid);

  const std::size_t m = n - 2;
  std::vector<double> explicit_part(m), g(m), lower(m), diag(m), upper(m);
  for (int step = 0; step < steps; ++step) {
    const double t_new = config.t0 + dt * (step + 1);
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t i = k + 1;
      const double lap = (s[i - 1] - 2.0 * s[i] + s[i + 1]) / h2;
      explicit_part[k] = grid.values[i] + (1.0 - th) * dt * lap;
    }
    s[0] = positive_log(u(grid.node(0), std::nullopt, t_new), grid.node(0));
    s[n - 1] = positive_log(u(grid.node(n - 1), std::nullopt, t_new), grid.node(n - 1));

    const double c = th * dt / h2;
    std::vector<double> history;
    bool converged = false;
    int it = 0;
    while (it < config.max_newton) {
      for (std::size_t k = 0; k < m; ++k) {
        const std::size_t i = k + 1;
        const double e = std::exp(s[i]);
        g[k] = e - c * (s[i - 1] - 2.0 * s[i] + s[i + 1]) - explicit_part[k];
        diag[k] = e + 2.0 * c;
        lower[k] = -c;
        upper[k] = -c;
      }
      history.push_back(max_abs(g));
      for (auto& x : g) x = -x;
      thomas(lower, diag, upper, g);
      ++it;
      for (std::size_t k = 0; k < m; ++k) s[k + 1] += g[k];
      if (max_abs(g) <= config.newton_tol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      std::ostringstream os;
      os << "Newton did not converge at t=" << t_new << " after " << it << " iterations; "
         << trace(history);
      throw SolverError(os.str());
    }
    out.max_newton_iterations = std::max(out.max_newton_iterations, it);
    for (std::size_t i = 0; i < n; ++i) grid.values[i] = std::exp(s[i]);
    out.steps = step + 1;
    if (config.store_trajectory) {
      out.times.push_back(t_new);
      out.states.push_back(grid);
    } else {
      out.times.back() = t_new;
      out.states.back() = grid;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Grid2D sample(const Field& exact, Interval x, Interval y, std::size_t nx, std::size_t ny,
              std::optional<double> t) {
  const ExactSampler u(exact, 2);
  Grid2D g(x, y, nx, ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) g.at(i, j) = u(g.x_at(i), g.y_at(j), t);
  }
  return g;
}

void fill_interior_from_boundary(Grid2D& g) {
  const double W = static_cast<double>(g.nx - 1), H = static_cast<double>(g.ny - 1);
  const std::size_t ie = g.nx - 1, je = g.ny - 1;
  for (std::size_t j = 1; j < je; ++j) {
    const double b = static_cast<double>(j) / H;
    for (std::size_t i = 1; i < ie; ++i) {
      const double a = static_cast<double>(i) / W;
      const double lr = (1 - a) * g.at(0, j) + a * g.at(ie, j);
      const double bt = (1 - b) * g.at(i, 0) + b * g.at(i, je);
      const double corners = (1 - a) * (1 - b) * g.at(0, 0) + a * (1 - b) * g.at(ie, 0) +
                             (1 - a) * b * g.at(0, je) + a * b * g.at(ie, je);
      g.at(i, j) = lr + bt - corners;
    }
  }
}

namespace {

/// Interior-unknown numbering for a Grid2D: k = (j-1)(nx-2) + (i-1).
struct Interior {
  std::size_t nx, ny, mx, my;
  explicit Interior(const Grid2D& g) : nx(g.nx), ny(g.ny), mx(g.nx - 2), my(g.ny - 2) {}
  std::size_t size() const { return mx * my; }
  std::size_t k(std::size_t i, std::size_t j) const { return (j - 1) * mx + (i - 1); }
};

double five_point(const std::vector<double>& s, const Grid2D& g, std::size_t i, std::size_t j) {
  const double hx2 = g.hx() * g.hx(), hy2 = g.hy() * g.hy();
  const double c = s[g.index(i, j)];
  return (s[g.index(i - 1, j)] - 2.0 * c + s[g.index(i + 1, j)]) / hx2 +
         (s[g.index(i, j - 1)] - 2.0 * c + s[g.index(i, j + 1)]) / hy2;
}

/// Adds the five-point stencil scaled by `scale(i,j)` into a banded matrix.
template <class Scale>
void add_laplacian(BandedMatrix& J, const Grid2D& g, const Interior& in, Scale scale) {
  const double hx2 = g.hx() * g.hx(), hy2 = g.hy() * g.hy();
  for (std::size_t j = 1; j + 1 < g.ny; ++j) {
    for (std::size_t i = 1; i + 1 < g.nx; ++i) {
      const std::size_t k = in.k(i, j);
      const double c = scale(i, j);
      J(k, k) += c * (-2.0 / hx2 - 2.0 / hy2);
      if (i > 1) J(k, in.k(i - 1, j)) += c / hx2;
      if (i + 2 < g.nx) J(k, in.k(i + 1, j)) += c / hx2;
      if (j > 1) J(k, in.k(i, j - 1)) += c / hy2;
      if (j + 2 < g.ny) J(k, in.k(i, j + 1)) += c / hy2;
    }
  }
}

}  // namespace

Trajectory2D solve_fast2d(const Fast2dProblem& problem, const SolverConfig& config) {
  config.validate();
  const ExactSampler u(problem.exact, 2);
  Grid2D grid(problem.x, problem.y, problem.nx, problem.ny);
  const Interior in(grid);
  const double th = theta(config);
  const double lambda = problem.sink;
  const auto [steps, dt] = plan(config);

  std::vector<double> f(grid.values.size(), 1.0);
  if (problem.weight) {
    const CompiledExpr w(*problem.weight);
    Point p;
    for (std::size_t j = 0; j < grid.ny; ++j) {
      for (std::size_t i = 0; i < grid.nx; ++i) {
        p["x"] = grid.x_at(i);
        p["y"] = grid.y_at(j);
        f[grid.index(i, j)] = w(p);
      }
    }
  }

  if (problem.initial) {
    const auto& g0 = *problem.initial;
    if (g0.nx != grid.nx || g0.ny != grid.ny) throw UsageError("initial grid shape mismatch");
    grid.values = g0.values;
  } else {
    grid = sample(problem.exact, problem.x, problem.y, problem.nx, problem.ny, config.t0);
  }
  std::vector<double> s(grid.values.size());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = positive_log(grid.values[k], double(k));

  Trajectory2D out;
  out.times.push_back(config.t0);
  out.states.push_back(grid);

  std::vector<double> explicit_part(in.size()), g(in.size());
  for (int step = 0; step < steps; ++step) {
    const double t_new = config.t0 + dt * (step + 1);
    for (std::size_t j = 1; j + 1 < grid.ny; ++j) {
      for (std::size_t i = 1; i + 1 < grid.nx; ++i) {
        const std::size_t n = grid.index(i, j);
        const double rate = f[n] * five_point(s, grid, i, j) - lambda * grid.values[n];
        explicit_part[in.k(i, j)] = grid.values[n] + (1.0 - th) * dt * rate;
      }
    }
    for (std::size_t j = 0; j < grid.ny; ++j) {
      for (std::size_t i = 0; i < grid.nx; ++i) {
        if (!grid.on_boundary(i, j)) continue;
        s[grid.index(i, j)] = positive_log(u(grid.x_at(i), grid.y_at(j), t_new), grid.x_at(i));
      }
    }

    std::vector<double> history;
    bool converged = false;
    int it = 0;
    while (it < config.max_newton) {
      BandedMatrix J(in.size(), in.mx);
      for (std::size_t j = 1; j + 1 < grid.ny; ++j) {
        for (std::size_t i = 1; i + 1 < grid.nx; ++i) {
          const std::size_t n = grid.index(i, j), k = in.k(i, j);
          const double e = std::exp(s[n]);
          g[k] = e * (1.0 + th * dt * lambda) - th * dt * f[n] * five_point(s, grid, i, j) -
                 explicit_part[k];
          J(k, k) += e * (1.0 + th * dt * lambda);
        }
      }
      add_laplacian(J, grid, in, [&](std::size_t i, std::size_t j) {
        return -th * dt * f[grid.index(i, j)];
      });
      history.push_back(max_abs(g));
      for (auto& x : g) x = -x;
      J.factor();
      J.solve(g);
      ++it;
      for (std::size_t j = 1; j + 1 < grid.ny; ++j) {
        for (std::size_t i = 1; i + 1 < grid.nx; ++i) s[grid.index(i, j)] += g[in.k(i, j)];
      }
      if (max_abs(g) <= config.newton_tol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      std::ostringstream os;
      os << "Newton did not converge at t=" << t_new << " after " << it << " iterations; "
         << trace(history);
      throw SolverError(os.str());
    }
    out.max_newton_iterations = std::max(out.max_newton_iterations, it);
    for (std::size_t n = 0; n < s.size(); ++n) grid.values[n] = std::exp(s[n]);
    out.steps = step + 1;
    if (config.store_trajectory) {
      out.times.push_back(t_new);
      out.states.push_back(grid);
    } else {
      out.times.back() = t_new;
      out.states.back() = grid;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

LiouvilleResult solve_liouville(const LiouvilleProblem& problem) {
  if (!(problem.newton_tol > 0.0)) throw ParameterError("Newton tolerance must be positive");
  if (problem.max_newton < 1) throw ParameterError("max Newton iterations must be at least 1");
  Grid2D w(problem.x, problem.y, problem.nx, problem.ny);
  const Interior in(w);
  const ExactSampler b(problem.boundary, 2);
  if (b.time_dependent()) throw UsageError("Liouville boundary field must not depend on t");
  for (std::size_t j = 0; j < w.ny; ++j) {
    for (std::size_t i = 0; i < w.nx; ++i) {
      if (w.on_boundary(i, j)) w.at(i, j) = b(w.x_at(i), w.y_at(j), std::nullopt);
    }
  }
  fill_interior_from_boundary(w);

  std::vector<double> q(w.values.size(), 1.0);
  if (problem.source) {
    const CompiledExpr src(*problem.source);
    Point p;
    for (std::size_t j = 0; j < w.ny; ++j) {
      for (std::size_t i = 0; i < w.nx; ++i) {
        p["x"] = w.x_at(i);
        p["y"] = w.y_at(j);
        q[w.index(i, j)] = src(p);
      }
    }
  }
  const double lambda = problem.lambda;

  auto residual = [&](const std::vector<double>& v, std::vector<double>& r) {
    for (std::size_t j = 1; j + 1 < w.ny; ++j) {
      for (std::size_t i = 1; i + 1 < w.nx; ++i) {
        const std::size_t n = w.index(i, j);
        r[in.k(i, j)] = five_point(v, w, i, j) - q[n] * std::exp(lambda * v[n]);
      }
    }
    const double m = max_abs(r);
    return std::isfinite(m) ? m : INFINITY;
  };

  LiouvilleResult out;
  std::vector<double> r(in.size()), delta(in.size());
  double norm = residual(w.values, r);
  out.residual_history.push_back(norm);
  while (norm > problem.newton_tol) {
    if (out.iterations >= problem.max_newton) {
      throw SolverError("Newton did not converge after " + std::to_string(out.iterations) +
                        " iterations; " + trace(out.residual_history));
    }
    BandedMatrix J(in.size(), in.mx);
    add_laplacian(J, w, in, [](std::size_t, std::size_t) { return 1.0; });
    for (std::size_t j = 1; j + 1 < w.ny; ++j) {
      for (std::size_t i = 1; i + 1 < w.nx; ++i) {
        const std::size_t n = w.index(i, j), k = in.k(i, j);
        J(k, k) -= q[n] * lambda * std::exp(lambda * w.values[n]);
        delta[k] = -r[k];
      }
    }
    J.factor();
    J.solve(delta);

    double alpha = 1.0;
    std::vector<double> trial = w.values;
    double trial_norm = INFINITY;
    while (alpha >= 1e-10) {
      for (std::size_t j = 1; j + 1 < w.ny; ++j) {
        for (std::size_t i = 1; i + 1 < w.nx; ++i) {
          const std::size_t n = w.index(i, j);
          trial[n] = w.values[n] + alpha * delta[in.k(i, j)];
        }
      }
      trial_norm = residual(trial, r);
      if (trial_norm < norm) break;
      alpha *= 0.5;
    }
    if (!(trial_norm < norm)) {
      throw SolverError("damped Newton step failed to reduce the residual; " +
                        trace(out.residual_history));
    }
    w.values = trial;
    norm = trial_norm;
    ++out.iterations;
    out.residual_history.push_back(norm);
  }
  out.solution = std::move(w);
  return out;
}

// ---------------------------------------------------------------------------

ChargeTransferState charge_transfer_rhs(const ChargeTransferState& s,
                                        const ChargeTransferParams& p) {
  const double ef = std::exp(s.f), ep = std::exp(s.psi), g = s.dphi * s.dphi;
  return {s.df, ef + p.A * g, s.dpsi, ep - p.B * g, s.dphi, ep - ef};
}

namespace {

ChargeTransferState axpy(const ChargeTransferState& x, double a, const ChargeTransferState& d) {
  return {x.f + a * d.f,     x.df + a * d.df,     x.psi + a * d.psi,
          x.dpsi + a * d.dpsi, x.phi + a * d.phi, x.dphi + a * d.dphi};
}

bool blown_up(const ChargeTransferState& s) {
  for (double v : {s.f, s.df, s.psi, s.dpsi, s.phi, s.dphi}) {
    if (!std::isfinite(v) || std::fabs(v) > kBlowUp) return true;
  }
  return false;
}

StepPlan ode_plan(Interval range, double step) {
  if (!(step > 0.0)) throw ParameterError("ODE step must be positive");
  const double span = range.hi - range.lo;
  if (span == 0.0) return {0, 0.0};
  const int n = std::max(1, static_cast<int>(std::ceil(std::fabs(span) / step - 1e-9)));
  return {n, span / n};
}

}  // namespace

OdeTrajectory integrate_charge_transfer_ode(const ChargeTransferState& initial,
                                            const ChargeTransferParams& params,
                                            Interval eta_range, double step) {
  if (blown_up(initial)) throw ParameterError("initial state must be finite");
  const auto [n, h] = ode_plan(eta_range, step);
  OdeTrajectory out;
  out.eta.push_back(eta_range.lo);
  out.states.push_back(initial);
  ChargeTransferState s = initial;
  for (int i = 0; i < n; ++i) {
    const auto k1 = charge_transfer_rhs(s, params);
    const auto k2 = charge_transfer_rhs(axpy(s, 0.5 * h, k1), params);
    const auto k3 = charge_transfer_rhs(axpy(s, 0.5 * h, k2), params);
    const auto k4 = charge_transfer_rhs(axpy(s, h, k3), params);
    ChargeTransferState next = s;
    next = axpy(next, h / 6.0, k1);
    next = axpy(next, h / 3.0, k2);
    next = axpy(next, h / 3.0, k3);
    next = axpy(next, h / 6.0, k4);
    const double eta = eta_range.lo + h * (i + 1);
    if (blown_up(next)) {
      out.blow_up_at = eta;
      break;
    }
    s = next;
    out.eta.push_back(eta);
    out.states.push_back(s);
  }
  return out;
}

ScalarOdeTrajectory integrate_second_order(const std::function<double(double)>& g, double y0,
                                           double dy0, Interval eta_range, double step) {
  if (!std::isfinite(y0) || !std::isfinite(dy0)) throw ParameterError("initial state must be finite");
  const auto [n, h] = ode_plan(eta_range, step);
  ScalarOdeTrajectory out;
  out.eta.push_back(eta_range.lo);
  out.y.push_back(y0);
  out.dy.push_back(dy0);
  double y = y0, dy = dy0;
  for (int i = 0; i < n; ++i) {
    const double k1y = dy, k1d = g(y);
    const double k2y = dy + 0.5 * h * k1d, k2d = g(y + 0.5 * h * k1y);
    const double k3y = dy + 0.5 * h * k2d, k3d = g(y + 0.5 * h * k2y);
    const double k4y = dy + h * k3d, k4d = g(y + h * k3y);
    const double ny = y + h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
    const double nd = dy + h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d);
    const double eta = eta_range.lo + h * (i + 1);
    if (!std::isfinite(ny) || !std::isfinite(nd) || std::fabs(ny) > kBlowUp ||
        std::fabs(nd) > kBlowUp) {
      out.blow_up_at = eta;
      break;
    }
    y = ny;
    dy = nd;
    out.eta.push_back(eta);
    out.y.push_back(y);
    out.dy.push_back(dy);
  }
  return out;
}

// ---------------------------------------------------------------------------

HermiteTable::HermiteTable(std::string name, std::vector<double> nodes, std::vector<double> y,
                           std::vector<double> dy, std::vector<double> d2y)
    : name_(std::move(name)),
      nodes_(std::move(nodes)),
      y_(std::move(y)),
      dy_(std::move(dy)),
      d2y_(std::move(d2y)) {
  const std::size_t n = nodes_.size();
  if (n < 2 || y_.size() != n || dy_.size() != n || d2y_.size() != n) {
    throw UsageError("HermiteTable: need at least two nodes with matching data");
  }
  if (nodes_.front() > nodes_.back()) {
    std::reverse(nodes_.begin(), nodes_.end());
    std::reverse(y_.begin(), y_.end());
    std::reverse(dy_.begin(), dy_.end());
    std::reverse(d2y_.begin(), d2y_.end());
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) throw UsageError("HermiteTable: nodes must be monotone");
  }
}

double HermiteTable::evaluate(int order, double x) const {
  if (order < 0 || order > 2) throw UsageError("HermiteTable: order must be 0, 1 or 2");
  if (!(x >= nodes_.front() && x <= nodes_.back())) return NAN;
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  std::size_t i = it == nodes_.begin() ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
  if (i + 1 >= nodes_.size()) i = nodes_.size() - 2;
  const double H = nodes_[i + 1] - nodes_[i];
  const double t = (x - nodes_[i]) / H;

  // Basis polynomials in t as coefficient lists t^0..t^5.
  static constexpr double basis[6][6] = {
      {1, 0, 0, -10, 15, -6},      // y0
      {0, 1, 0, -6, 8, -3},        // H dy0
      {0, 0, 0.5, -1.5, 1.5, -0.5},  // H^2 d2y0
      {0, 0, 0, 10, -15, 6},       // y1
      {0, 0, 0, -4, 7, -3},        // H dy1
      {0, 0, 0, 0.5, -1, 0.5},     // H^2 d2y1
  };
  const double weights[6] = {y_[i],     H * dy_[i],     H * H * d2y_[i],
                             y_[i + 1], H * dy_[i + 1], H * H * d2y_[i + 1]};
  double sum = 0.0;
  for (int b = 0; b < 6; ++b) {
    double val = 0.0;
    for (int p = 5; p >= order; --p) {
      double c = basis[b][p];
      for (int d = 0; d < order; ++d) c *= static_cast<double>(p - d);
      val = val * t + c;
    }
    sum += weights[b] * val;
  }
  return sum / std::pow(H, order);
}

ChargeTransferProfiles tabulate(const OdeTrajectory& traj, const ChargeTransferParams& params) {
  const std::size_t n = traj.states.size();
  std::vector<double> f(n), df(n), d2f(n), p(n), dp(n), d2p(n), q(n), dq(n), d2q(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = traj.states[i];
    const auto r = charge_transfer_rhs(s, params);
    f[i] = s.f, df[i] = s.df, d2f[i] = r.df;
    p[i] = s.psi, dp[i] = s.dpsi, d2p[i] = r.dpsi;
    q[i] = s.phi, dq[i] = s.dphi, d2q[i] = r.dphi;
  }
  ChargeTransferProfiles out;
  out.f = std::make_shared<HermiteTable>("f", traj.eta, f, df, d2f);
  out.psi = std::make_shared<HermiteTable>("psi", traj.eta, p, dp, d2p);
  out.phi = std::make_shared<HermiteTable>("phi", traj.eta, q, dq, d2q);
  return out;
}

// ---------------------------------------------------------------------------

double max_error(const Grid1D& g, const Field& exact, double t) {
  const ExactSampler u(exact, 1);
  double m = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    m = std::max(m, std::fabs(g.values[i] - u(g.node(i), std::nullopt, t)));
  }
  return m;
}

double max_error(const Grid2D& g, const Field& exact, std::optional<double> t,
                 bool interior_only) {
  const ExactSampler u(exact, 2);
  double m = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      if (interior_only && g.on_boundary(i, j)) continue;
      m = std::max(m, std::fabs(g.at(i, j) - u(g.x_at(i), g.y_at(j), t)));
    }
  }
  return m;
}

nlohmann::json to_json(const ConvergenceReport& r) {
  nlohmann::json j;
  j["h"] = r.h;
  j["errors"] = r.errors;
  j["orders"] = r.orders;
  j["flagged"] = r.flagged;
  j["band"] = {r.band_lo, r.band_hi};
  j["ok"] = r.ok();
  return j;
}

ConvergenceReport convergence_study(const std::vector<double>& spacings,
                                    const std::function<double(std::size_t)>& error_at,
                                    double band_lo, double band_hi) {
  if (spacings.size() < 2) throw ParameterError("a convergence study needs at least two grids");
  for (std::size_t i = 1; i < spacings.size(); ++i) {
    if (std::fabs(spacings[i - 1] / spacings[i] - 2.0) > 1e-9 * 2.0) {
      throw ParameterError("each grid must refine the previous one by exactly 2x");
    }
  }
  ConvergenceReport r;
  r.band_lo = band_lo;
  r.band_hi = band_hi;
  r.h = spacings;
  for (std::size_t i = 0; i < spacings.size(); ++i) {
    const double e = error_at(i);
    if (!(e > 0.0) || !std::isfinite(e)) {
      throw DomainError("grid error must be positive and finite, got " + std::to_string(e));
    }
    r.errors.push_back(e);
  }
  for (std::size_t i = 0; i + 1 < r.errors.size(); ++i) {
    const double p = std::log(r.errors[i] / r.errors[i + 1]) / std::log(r.h[i] / r.h[i + 1]);
    r.orders.push_back(p);
    if (!(p >= band_lo && p <= band_hi)) r.flagged.push_back(i);
  }
  return r;
}

}  // namespace fastdiff
