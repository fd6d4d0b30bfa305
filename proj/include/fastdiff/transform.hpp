#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fastdiff/field.hpp"
#include "fastdiff/harmonic.hpp"

namespace fastdiff {

/// u(x,y,t) = |grad eta|^2 v(xi(x,y), eta(x,y), t) for v over (xi, eta, t).
/// Maps solutions of u_t = Lap ln u onto new solutions.
Field branch(const HarmonicPair& pair, const Field& v);

/// Reinterprets a field over (x, y, t) as one over (xi, eta, t), so a
/// solution in the plane can seed branch().
Field as_seed(const Field& u);

/// Componentwise source f_i(u_1..u_m) for parabolic systems.
struct SourceTerm {
  std::size_t arity = 0;
  std::function<std::vector<double>(std::span<const double>)> evaluate;
};

/// f(scale * u) - scale * f(u), componentwise.
std::vector<double> homogeneity_residual(const SourceTerm& f, std::span<const double> u,
                                         double scale);

struct HomogeneityCheck {
  int samples = 50;
  double tolerance = 1e-9;
  unsigned long long seed = 7;
};

/// u_i = |grad eta|^2 v_i(xi, eta, t). Requires f to be degree-1 homogeneous
/// on random positive samples; throws PreconditionError naming the worst one.
std::vector<Field> lift_system(const HarmonicPair& pair, std::span<const Field> v,
                               const SourceTerm& f, const HomogeneityCheck& check = {});

/// u(x,y,t) = (eta_x^2 + eta_y^2) v(eta(x,y), t) for v over (eta, t).
Field reduce_via_harmonic(const Expr& eta, const Field& v);

struct ConformalCheck {
  Box box = {{"x", {-1.0, 1.0}}, {"y", {-1.0, 1.0}}};
  int samples = 50;
  double tolerance = 1e-8;
  unsigned long long seed = 11;
};

/// u = (f_x^2 + f_y^2) / f * v(ln f, t), solving u_t = f Lap ln u when
/// Lap ln f = 0. The weight f is an expression in the conformal coordinates,
/// which are named x and y here.
Field conformal_lift(const Expr& f, const Field& v, const ConformalCheck& check = {});

/// w(x,y) = v(xi, eta) + ln|grad eta|^2 / lambda for v over (xi, eta);
/// preserves solutions of Lap w = exp(lambda w).
Field liouville_shift(const HarmonicPair& pair, const Field& v, double lambda);

}  // namespace fastdiff
