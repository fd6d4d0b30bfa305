#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "fastdiff/expr.hpp"
#include "fastdiff/field.hpp"

namespace fastdiff {

/// Conjugate harmonic functions xi + i*eta = F(x + iy) with F analytic.
struct HarmonicPair {
  Expr xi;
  Expr eta;
  SingularSet singular;
  std::string description;
};

namespace pair_kind {

/// Re/Im of z^n.
struct Monomial {
  int n = 1;
};

/// Re/Im of exp(k z).
struct Exponential {
  double k = 1.0;
};

/// Re/Im of (a + ib) z + (c + id).
struct Affine {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
};

/// Caller-supplied pair, validated against the Cauchy-Riemann equations on
/// `samples` random points of `box` outside `singular`.
struct Custom {
  Expr xi;
  Expr eta;
  SingularSet singular;
  std::string description = "custom";
  Box box = {{"x", {-2.0, 2.0}}, {"y", {-2.0, 2.0}}};
  int samples = 64;
  double tolerance = 1e-8;
};

}  // namespace pair_kind

using PairKind = std::variant<pair_kind::Monomial, pair_kind::Exponential, pair_kind::Affine,
                              pair_kind::Custom>;

HarmonicPair harmonic_pair(const PairKind& kind);

/// Pair of F_outer(F_inner(z)): outer's (x, y) are replaced by inner's (xi, eta).
HarmonicPair compose(const HarmonicPair& outer, const HarmonicPair& inner);

/// (xi_x - eta_y, xi_y + eta_x) at p.
std::pair<double, double> cauchy_riemann_residual(const HarmonicPair& pair, const Point& p);

/// ((grad xi, grad eta), |grad xi|^2 - |grad eta|^2) at p.
std::pair<double, double> orthogonality_residual(const HarmonicPair& pair, const Point& p);

/// eta_x^2 + eta_y^2.
Expr grad_sq(const Expr& eta);

/// Laplacian of ln(eta_x^2 + eta_y^2) at p, or nullopt when |grad eta|^2 is
/// below `floor` (critical points of eta are genuine singularities of the log).
std::optional<double> log_gradient_laplacian(const Expr& eta, const Point& p,
                                             double floor = 1e-2);

Expr laplacian(const Expr& e, const std::string& x = "x", const std::string& y = "y");

/// True when both partials of e in (x, y) simplify to the constant zero.
bool is_spatially_constant(const Expr& e);

}  // namespace fastdiff
