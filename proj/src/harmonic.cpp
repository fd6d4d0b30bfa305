#include "fastdiff/harmonic.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "fastdiff/error.hpp"

namespace fastdiff {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void require_regular(const HarmonicPair& pair, const Point& p) {
  if (pair.singular.contains(p, 0.0)) {
    throw SingularEvaluation("point lies in the singular set", pair.singular.describe());
  }
}

HarmonicPair monomial(int n) {
  if (n < 1) throw ParameterError("monomial pair needs n >= 1, got " + std::to_string(n));
  const Expr x = var("x");
  const Expr y = var("y");
  // Re z^n = sum_j (-1)^j C(n,2j) x^(n-2j) y^(2j),
  // Im z^n = sum_j (-1)^j C(n,2j+1) x^(n-2j-1) y^(2j+1).
  Expr xi(0.0), eta(0.0);
  for (int k = 0; k <= n; ++k) {
    const double c = binomial(n, k);
    const Expr term = c * pow(x, n - k) * pow(y, k);
    const int j = k / 2;
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      xi = sign > 0 ? xi + term : xi - term;
    } else {
      eta = sign > 0 ? eta + term : eta - term;
    }
  }
  HarmonicPair pair{xi, eta, {}, "monomial(" + std::to_string(n) + ")"};
  if (n >= 2) {
    pair.singular.add_band("critical point of z^" + std::to_string(n) + " at the origin",
                           sqrt(x * x + y * y));
  }
  return pair;
}

HarmonicPair exponential(double k) {
  if (k == 0.0) throw RejectedPair("exponential pair with k = 0 is constant");
  const Expr x = var("x");
  const Expr y = var("y");
  std::ostringstream d;
  d << "exponential(" << k << ")";
  return {exp(k * x) * cos(k * y), exp(k * x) * sin(k * y), {}, d.str()};
}

HarmonicPair affine(const pair_kind::Affine& a) {
  if (a.a == 0.0 && a.b == 0.0) throw RejectedPair("affine pair with a = b = 0 is constant");
  const Expr x = var("x");
  const Expr y = var("y");
  std::ostringstream d;
  d << "affine(" << a.a << ", " << a.b << ", " << a.c << ", " << a.d << ")";
  return {a.a * x - a.b * y + a.c, a.b * x + a.a * y + a.d, {}, d.str()};
}

HarmonicPair custom(const pair_kind::Custom& c) {
  for (const auto& e : {c.xi, c.eta}) {
    for (const auto& v : free_variables(e)) {
      if (v != "x" && v != "y") throw RejectedPair("custom pair depends on '" + v + "'");
    }
  }
  HarmonicPair pair{c.xi, c.eta, c.singular, c.description};
  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Interval bx = c.box.at("x");
  const Interval by = c.box.at("y");
  double worst = 0.0;
  Point worst_point;
  int evaluated = 0;
  const CompiledExpr xi_x(differentiate(c.xi, "x")), xi_y(differentiate(c.xi, "y"));
  const CompiledExpr eta_x(differentiate(c.eta, "x")), eta_y(differentiate(c.eta, "y"));
  for (int i = 0; i < c.samples * 4 && evaluated < c.samples; ++i) {
    Point p{{"x", bx.lo + bx.width() * unit(rng)}, {"y", by.lo + by.width() * unit(rng)}};
    if (c.singular.contains(p, 1e-3)) continue;
    try {
      const double gx = eta_x(p), gy = eta_y(p);
      const double r1 = xi_x(p) - gy;
      const double r2 = xi_y(p) + gx;
      const double err = std::max(std::fabs(r1), std::fabs(r2)) /
                         (1.0 + std::sqrt(gx * gx + gy * gy));
      ++evaluated;
      if (err > worst) {
        worst = err;
        worst_point = p;
      }
    } catch (const SingularEvaluation&) {
    }
  }
  if (evaluated == 0) throw RejectedPair("custom pair could not be evaluated at any sample");
  if (worst > c.tolerance) {
    std::ostringstream msg;
    msg << "custom pair fails Cauchy-Riemann validation: worst scaled residual " << worst
        << " at (x=" << worst_point["x"] << ", y=" << worst_point["y"] << ")";
    throw RejectedPair(msg.str());
  }
  return pair;
}

}  // namespace

HarmonicPair harmonic_pair(const PairKind& kind) {
  return std::visit(
      [](const auto& k) -> HarmonicPair {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, pair_kind::Monomial>) {
          return monomial(k.n);
        } else if constexpr (std::is_same_v<K, pair_kind::Exponential>) {
          return exponential(k.k);
        } else if constexpr (std::is_same_v<K, pair_kind::Affine>) {
          return affine(k);
        } else {
          return custom(k);
        }
      },
      kind);
}

HarmonicPair compose(const HarmonicPair& outer, const HarmonicPair& inner) {
  const Substitution s{{"x", inner.xi}, {"y", inner.eta}};
  HarmonicPair out{substitute(outer.xi, s), substitute(outer.eta, s), inner.singular,
                   outer.description + " o " + inner.description};
  out.singular.merge(outer.singular.pullback(s, outer.description));
  return out;
}

std::pair<double, double> cauchy_riemann_residual(const HarmonicPair& pair, const Point& p) {
  require_regular(pair, p);
  const double r1 = eval(differentiate(pair.xi, "x"), p) - eval(differentiate(pair.eta, "y"), p);
  const double r2 = eval(differentiate(pair.xi, "y"), p) + eval(differentiate(pair.eta, "x"), p);
  return {r1, r2};
}

std::pair<double, double> orthogonality_residual(const HarmonicPair& pair, const Point& p) {
  require_regular(pair, p);
  const double ax = eval(differentiate(pair.xi, "x"), p);
  const double ay = eval(differentiate(pair.xi, "y"), p);
  const double bx = eval(differentiate(pair.eta, "x"), p);
  const double by = eval(differentiate(pair.eta, "y"), p);
  return {ax * bx + ay * by, (ax * ax + ay * ay) - (bx * bx + by * by)};
}

Expr grad_sq(const Expr& eta) {
  return square(differentiate(eta, "x")) + square(differentiate(eta, "y"));
}

Expr laplacian(const Expr& e, const std::string& x, const std::string& y) {
  return differentiate(differentiate(e, x), x) + differentiate(differentiate(e, y), y);
}

std::optional<double> log_gradient_laplacian(const Expr& eta, const Point& p, double floor) {
  const Expr rho = grad_sq(eta);
  if (!(eval(rho, p) > floor)) return std::nullopt;
  return eval(laplacian(ln(rho)), p);
}

bool is_spatially_constant(const Expr& e) {
  return differentiate(e, "x").is_constant(0.0) && differentiate(e, "y").is_constant(0.0);
}

}  // namespace fastdiff
