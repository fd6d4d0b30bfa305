#include "fastdiff/transform.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "fastdiff/error.hpp"

namespace fastdiff {

namespace {

void require_signature(const Field& f, const std::vector<std::string>& expected,
                       const char* op) {
  if (f.signature() != expected) {
    std::string want, got;
    for (const auto& v : expected) want += v + " ";
    for (const auto& v : f.signature()) got += v + " ";
    throw UsageError(std::string(op) + ": expected a field over ( " + want + "), got ( " + got +
                     ")");
  }
}

Field weighted_compose(const Expr& weight, const Field& v, const Substitution& s,
                       std::vector<std::string> signature, const SingularSet& extra,
                       const std::string& prefix) {
  Field inner = v.substitute(s, signature, prefix);
  SingularSet singular = extra;
  singular.merge(inner.singular_set());
  return Field(weight * inner.expr(), std::move(signature), std::move(singular));
}

}  // namespace

Field branch(const HarmonicPair& pair, const Field& v) {
  require_signature(v, {"xi", "eta", "t"}, "branch");
  const Substitution s{{"xi", pair.xi}, {"eta", pair.eta}};
  SingularSet singular = pair.singular;
  singular.add_band("zero of |grad eta|^2", grad_sq(pair.eta));
  return weighted_compose(grad_sq(pair.eta), v, s, {"x", "y", "t"}, singular, "seed");
}

Field as_seed(const Field& u) {
  require_signature(u, {"x", "y", "t"}, "as_seed");
  return u.rename({{"x", "xi"}, {"y", "eta"}});
}

std::vector<double> homogeneity_residual(const SourceTerm& f, std::span<const double> u,
                                         double scale) {
  std::vector<double> scaled(u.begin(), u.end());
  for (auto& x : scaled) x *= scale;
  const std::vector<double> a = f.evaluate(scaled);
  const std::vector<double> b = f.evaluate(u);
  if (a.size() != b.size()) throw UsageError("homogeneity_residual: inconsistent source size");
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - scale * b[i];
  return r;
}

std::vector<Field> lift_system(const HarmonicPair& pair, std::span<const Field> v,
                               const SourceTerm& f, const HomogeneityCheck& check) {
  if (f.arity == 0 || f.arity > v.size()) {
    throw UsageError("lift_system: source arity must satisfy 1 <= m <= n");
  }
  std::mt19937_64 rng(check.seed);
  std::uniform_real_distribution<double> value(0.1, 10.0);
  double worst = 0.0;
  std::vector<double> worst_u;
  double worst_scale = 0.0;
  for (int s = 0; s < check.samples; ++s) {
    std::vector<double> u(f.arity);
    for (auto& x : u) x = value(rng);
    const double scale = value(rng);
    const auto r = homogeneity_residual(f, u, scale);
    const auto fu = f.evaluate(u);
    if (r.size() != v.size()) {
      throw UsageError("lift_system: source returns " + std::to_string(r.size()) +
                       " components for " + std::to_string(v.size()) + " fields");
    }
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double err = std::fabs(r[i]) / (1.0 + scale * std::fabs(fu[i]));
      if (!(err <= worst)) {
        worst = std::isnan(err) ? INFINITY : err;
        worst_u = u;
        worst_scale = scale;
      }
    }
  }
  if (worst > check.tolerance) {
    std::ostringstream msg;
    msg << "source is not degree-1 homogeneous: residual " << worst << " at scale "
        << worst_scale << ", u = (";
    for (std::size_t i = 0; i < worst_u.size(); ++i) msg << (i ? ", " : "") << worst_u[i];
    msg << ")";
    throw PreconditionError(msg.str());
  }
  std::vector<Field> out;
  out.reserve(v.size());
  for (const auto& vi : v) out.push_back(branch(pair, vi));
  return out;
}

Field reduce_via_harmonic(const Expr& eta, const Field& v) {
  require_signature(v, {"eta", "t"}, "reduce_via_harmonic");
  for (const auto& name : free_variables(eta)) {
    if (name != "x" && name != "y") {
      throw UsageError("reduce_via_harmonic: eta depends on '" + name + "'");
    }
  }
  if (is_spatially_constant(eta)) {
    throw DegenerateInput("reduce_via_harmonic: eta is constant, so |grad eta|^2 vanishes");
  }
  SingularSet singular;
  singular.add_band("zero of |grad eta|^2", grad_sq(eta));
  return weighted_compose(grad_sq(eta), v, {{"eta", eta}}, {"x", "y", "t"}, singular, "profile");
}

Field conformal_lift(const Expr& f, const Field& v, const ConformalCheck& check) {
  require_signature(v, {"eta", "t"}, "conformal_lift");
  const Expr g2 = grad_sq(f);
  if (is_spatially_constant(f)) {
    throw DegenerateInput("conformal_lift: constant weight makes the lift vanish identically");
  }
  const CompiledExpr weight(f);
  const CompiledExpr grad(g2);
  const CompiledExpr lap_log(laplacian(ln(f)));
  std::mt19937_64 rng(check.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Interval bx = check.box.at("x");
  const Interval by = check.box.at("y");
  bool any_gradient = false;
  for (int s = 0; s < check.samples; ++s) {
    const Point p{{"x", bx.lo + bx.width() * unit(rng)}, {"y", by.lo + by.width() * unit(rng)}};
    const double fv = weight(p);
    if (!(fv > 0.0)) {
      std::ostringstream msg;
      msg << "conformal_lift: weight is not positive at (" << p.at("x") << ", " << p.at("y")
          << "): f = " << fv;
      throw DomainError(msg.str());
    }
    const double l = lap_log(p);
    if (!(std::fabs(l) < check.tolerance)) {
      std::ostringstream msg;
      msg << "conformal_lift: Lap ln f = " << l << " at (" << p.at("x") << ", " << p.at("y")
          << "), so ln f is not harmonic";
      throw PreconditionError(msg.str());
    }
    any_gradient = any_gradient || grad(p) > 0.0;
  }
  if (!any_gradient) {
    throw DegenerateInput("conformal_lift: grad f vanishes on every sample");
  }
  SingularSet singular;
  singular.add_band("zero of |grad f|^2", g2);
  singular.add_below("non-positive weight", f);
  return weighted_compose(g2 / f, v, {{"eta", ln(f)}}, {"x", "y", "t"}, singular, "profile");
}

Field liouville_shift(const HarmonicPair& pair, const Field& v, double lambda) {
  if (lambda == 0.0) throw ParameterError("liouville_shift: lambda must be nonzero");
  require_signature(v, {"xi", "eta"}, "liouville_shift");
  Field inner = v.substitute({{"xi", pair.xi}, {"eta", pair.eta}}, {"x", "y"}, "seed");
  SingularSet singular = pair.singular;
  singular.add_band("zero of |grad eta|^2", grad_sq(pair.eta));
  singular.merge(inner.singular_set());
  return Field(inner.expr() + ln(grad_sq(pair.eta)) / lambda, {"x", "y"}, std::move(singular));
}

}  // namespace fastdiff
