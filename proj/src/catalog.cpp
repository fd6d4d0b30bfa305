#include "fastdiff/catalog.hpp"

#include <cmath>

#include "fastdiff/error.hpp"
#include "fastdiff/harmonic.hpp"
#include "fastdiff/transform.hpp"

namespace fastdiff {

namespace {

SingularSet time_origin() {
  SingularSet s;
  s.add_below("t <= 0", var("t"));
  return s;
}

/// 2 (tan^2 a + tanh^2 b) tanh t / (1 + tan^2 a tanh^2 b tanh^2 t): the seed
/// branched by F(z) = cos z, in the variables a, b.
Expr tan_tanh_profile(const Expr& a, const Expr& b) {
  const Expr t = var("t");
  const Expr ta = square(tan(a));
  const Expr tb = square(tanh(b));
  return 2.0 * (ta + tb) * tanh(t) / (1.0 + ta * tb * square(tanh(t)));
}

SingularSet tan_tanh_singular(const Expr& a, const Expr& b) {
  SingularSet s = time_origin();
  s.add_band("pole of tan", cos(a));
  s.add_band("zero of tan^2 + tanh^2", sqrt(square(tan(a)) + square(tanh(b))));
  return s;
}

}  // namespace

std::string_view to_string(EquationTag tag) {
  switch (tag) {
    case EquationTag::Fast2d: return "fast2d";
    case EquationTag::Fast1d: return "fast1d";
    case EquationTag::Weighted: return "weighted";
    case EquationTag::Liouville: return "liouville";
    case EquationTag::LiouvilleInhomogeneous: return "liouville_inhomogeneous";
    case EquationTag::ChargeTransfer: return "charge_transfer";
  }
  return "?";
}

std::optional<EquationTag> parse_equation_tag(std::string_view text) {
  for (auto tag : {EquationTag::Fast2d, EquationTag::Fast1d, EquationTag::Weighted,
                   EquationTag::Liouville, EquationTag::LiouvilleInhomogeneous,
                   EquationTag::ChargeTransfer}) {
    if (to_string(tag) == text) return tag;
  }
  return std::nullopt;
}

std::string_view to_string(Family f) {
  switch (f) {
    case Family::TrigSh: return "trig_sh";
    case Family::TrigCos: return "trig_cos";
    case Family::HypCos: return "hyp_cos";
    case Family::HypSh: return "hyp_sh";
  }
  return "?";
}

std::optional<Family> parse_family(std::string_view text) {
  for (auto f : {Family::TrigSh, Family::TrigCos, Family::HypCos, Family::HypSh}) {
    if (to_string(f) == text) return f;
  }
  return std::nullopt;
}

SolutionEntry base_seed() {
  const Expr xi = var("xi"), eta = var("eta"), t = var("t");
  const Expr th = tanh(t);
  SingularSet s = time_origin();
  s.add_band("xi = eta = 0", sqrt(square(xi) + square(eta)));
  SolutionEntry e;
  e.id = "seed";
  e.tag = EquationTag::Fast2d;
  e.field = Field(2.0 * th / (square(xi) + square(eta) * square(th)), {"xi", "eta", "t"}, s);
  e.provenance = "tanh seed v = 2 tanh t / (xi^2 + eta^2 tanh^2 t) of the fast diffusion "
                 "equation in the (xi, eta) plane";
  e.domain = {{"xi", {-2.0, 2.0}}, {"eta", {-2.0, 2.0}}, {"t", {0.05, 3.0}}};
  return e;
}

std::vector<SolutionEntry> planar_solutions() {
  const Expr x = var("x"), y = var("y"), t = var("t");
  const Expr th = tanh(t);
  std::vector<SolutionEntry> out;

  {
    const Expr cx = square(coth(x));
    const Expr ty = square(tan(y));
    SingularSet s = time_origin();
    s.add_band("pole of coth", sinh(x));
    s.add_band("pole of tan", cos(y));
    SolutionEntry e;
    e.id = "planar.coth_tan";
    e.field = Field(2.0 * (cx + ty) * th / (1.0 + cx * ty * square(th)), {"x", "y", "t"}, s);
    e.provenance = "seed branched by F(z) = sinh z (xi = sinh x cos y, eta = cosh x sin y); "
                   "carried as a standalone closed form";
    e.domain = {{"x", {0.05, 2.0}}, {"y", {-1.5, 1.5}}, {"t", {0.05, 3.0}}};
    out.push_back(std::move(e));
  }
  {
    SolutionEntry e;
    e.id = "planar.tan_tanh";
    e.field = Field(tan_tanh_profile(x, y), {"x", "y", "t"}, tan_tanh_singular(x, y));
    e.provenance = "seed branched by F(z) = cos z (xi = cos x cosh y, eta = -sin x sinh y); "
                   "carried as a standalone closed form";
    e.domain = {{"x", {-1.5, 1.5}}, {"y", {-2.0, 2.0}}, {"t", {0.05, 3.0}}};
    out.push_back(std::move(e));
  }
  {
    const Expr a = pow(x, 3.0) - 3.0 * x * square(y);
    const Expr b = 3.0 * square(x) * y - pow(y, 3.0);
    SingularSet s = tan_tanh_singular(a, b);
    s.add_band("critical point of z^3 at the origin", sqrt(square(x) + square(y)));
    SolutionEntry e;
    e.id = "planar.cubic";
    e.field = Field(9.0 * square(square(x) + square(y)) * tan_tanh_profile(a, b), {"x", "y", "t"},
                    s);
    e.provenance = "tan/tanh solution re-branched by F(z) = z^3; prefactor "
                   "18 (x^2 + y^2)^2 = 2 |grad eta|^2";
    e.domain = {{"x", {-1.2, 1.2}}, {"y", {-1.2, 1.2}}, {"t", {0.05, 3.0}}};
    out.push_back(std::move(e));
  }
  {
    const Expr a = exp(3.0 * x) * cos(3.0 * y);
    const Expr b = exp(3.0 * x) * sin(3.0 * y);
    SolutionEntry e;
    e.id = "planar.exp3";
    e.field = Field(9.0 * exp(6.0 * x) * tan_tanh_profile(a, b), {"x", "y", "t"},
                    tan_tanh_singular(a, b));
    e.provenance =
        "tan/tanh solution re-branched by F(z) = exp(3z), arguments exp(3x) cos 3y and "
        "exp(3x) sin 3y; the printed prefactor 18 exp(x) fails the fast-diffusion residual "
        "oracle, the shipped prefactor 18 exp(6x) = 2 |grad eta|^2 passes it";
    e.domain = {{"x", {-1.0, 0.3}}, {"y", {-1.0, 1.0}}, {"t", {0.05, 3.0}}};
    out.push_back(std::move(e));
  }
  for (auto& e : out) e.tag = EquationTag::Fast2d;
  return out;
}

SolutionEntry exp3_as_printed() {
  const Expr x = var("x"), y = var("y");
  const Expr a = exp(3.0 * x) * cos(3.0 * y);
  const Expr b = exp(3.0 * x) * sin(3.0 * y);
  SolutionEntry e;
  e.id = "planar.exp3_printed";
  e.tag = EquationTag::Fast2d;
  e.field = Field(9.0 * exp(x) * tan_tanh_profile(a, b), {"x", "y", "t"},
                  tan_tanh_singular(a, b));
  e.provenance = "exp(3z) solution with the prefactor 18 exp(x) as printed";
  e.domain = {{"x", {-1.0, 0.3}}, {"y", {-1.0, 1.0}}, {"t", {0.05, 3.0}}};
  return e;
}

SolutionEntry one_dim_family(Family family, double k1, double k2, double lambda) {
  if (lambda == 0.0) throw ParameterError("one_dim_family: lambda must be nonzero");
  const bool hyperbolic = family == Family::HypCos || family == Family::HypSh;
  if (hyperbolic && !(k1 > std::fabs(k2))) {
    throw ParameterError("one_dim_family: hyperbolic families need k1 > |k2| so that "
                         "sqrt(k1^2 - k2^2) is real and nonzero");
  }
  if (!hyperbolic && k1 == 0.0 && k2 == 0.0) {
    throw ParameterError("one_dim_family: k1 = k2 = 0 makes the profile vanish");
  }
  if (family == Family::HypCos && lambda < 0.0) {
    throw ParameterError("one_dim_family: hyp_cos with lambda < 0 is negative everywhere");
  }
  const Expr eta = var("eta"), t = var("t");
  const Expr lt = lambda * t;
  const double L = std::fabs(lambda);
  SingularSet s;
  Expr numerator, denominator;
  Box domain;
  switch (family) {
    case Family::TrigSh: {
      const double K = std::hypot(k1, k2);
      numerator = K * sinh(lt);
      denominator = k1 * cos(eta) + k2 * sin(eta) + K * cosh(lt);
      s.add_below("t <= 0", t);
      domain = {{"eta", {-3.0, 3.0}}, {"t", {0.05 / L, 2.0 / L}}};
      break;
    }
    case Family::TrigCos: {
      const double K = std::hypot(k1, k2);
      numerator = K * cos(lt);
      denominator = k1 * cos(eta) + k2 * sin(eta) - K * sin(lt);
      s.add_band("zero of cos(lambda t)", cos(lt));
      // Positive where cos(eta - alpha) exceeds sin(lambda t), alpha = atan2(k2, k1);
      // for lambda < 0 the window recentres on alpha + pi.
      const double centre = std::atan2(k2, k1) + (lambda < 0.0 ? M_PI : 0.0);
      domain = {{"eta", {centre - 0.9, centre + 0.9}}, {"t", {0.01 / L, 0.5 / L}}};
      break;
    }
    case Family::HypCos: {
      const double H = std::sqrt(k1 * k1 - k2 * k2);
      numerator = H * cos(lt);
      denominator = k1 * cosh(eta) + k2 * sinh(eta) + H * sin(lt);
      s.add_band("zero of cos(lambda t)", cos(lt));
      domain = {{"eta", {-2.0, 2.0}}, {"t", {0.01 / L, 1.4 / L}}};
      break;
    }
    case Family::HypSh: {
      const double H = std::sqrt(k1 * k1 - k2 * k2);
      numerator = H * sinh(lt);
      denominator = k1 * cosh(eta) + k2 * sinh(eta) - H * cosh(lt);
      s.add_below("t <= 0", t);
      // k1 cosh eta + k2 sinh eta = H cosh(eta + beta); positive where |eta + beta| > |lambda| t.
      const double beta = std::atanh(k2 / k1);
      domain = {{"eta", {1.0 - beta, 3.0 - beta}}, {"t", {0.05 / L, 0.9 / L}}};
      break;
    }
  }
  s.add_band("zero of the denominator", denominator);
  SolutionEntry e;
  e.id = "fast1d." + std::string(to_string(family));
  e.tag = EquationTag::Fast1d;
  e.field = Field(numerator / (lambda * denominator), {"eta", "t"}, s);
  e.params = {{"k1", k1}, {"k2", k2}, {"lambda", lambda}};
  e.provenance = "one-dimensional " + std::string(to_string(family)) +
                 " profile; also solves w_t = w w_ee - w_e^2 for w = 1/v";
  e.domain = std::move(domain);
  return e;
}

bool liouville_sign_consistent(LiouvilleKind kind, double lambda) {
  return kind == LiouvilleKind::Sec ? lambda > 0.0 : lambda < 0.0;
}

SolutionEntry liouville_solutions(double A, double lambda, const Expr& eta, LiouvilleKind kind,
                                  Box domain) {
  if (A == 0.0 || lambda == 0.0) {
    throw ParameterError("liouville_solutions: A and lambda must be nonzero");
  }
  if (is_spatially_constant(eta)) {
    throw DegenerateInput("liouville_solutions: eta must be a non-constant harmonic function");
  }
  const Expr rho = grad_sq(eta);
  const Expr arg = A * eta;
  const Expr profile = kind == LiouvilleKind::Sec ? square(sec(arg)) : square(sech(arg));
  SingularSet s;
  s.add_band("zero of |grad eta|^2", rho);
  if (kind == LiouvilleKind::Sec) s.add_band("pole of sec(A eta)", cos(arg));
  SolutionEntry e;
  e.id = kind == LiouvilleKind::Sec ? "liouville.sec" : "liouville.sech";
  e.tag = EquationTag::Liouville;
  e.field = Field(ln(abs((2.0 * A * A / lambda) * rho * profile)) / lambda, {"x", "y"}, s);
  e.params = {{"A", A}, {"lambda", lambda}};
  e.provenance = std::string(kind == LiouvilleKind::Sec ? "sec^2" : "sech^2") +
                 " solution of Lap w = exp(lambda w) with eta = " + to_sexpr(eta) +
                 (kind == LiouvilleKind::Sec ? "; solves the equation for lambda > 0"
                                             : "; solves the equation for lambda < 0");
  e.domain = std::move(domain);
  return e;
}

SolutionEntry liouville_inhomogeneous_solution(double lambda, const Expr& eta, Box domain) {
  if (lambda == 0.0) throw ParameterError("liouville_inhomogeneous_solution: lambda = 0");
  if (is_spatially_constant(eta)) {
    throw DegenerateInput(
        "liouville_inhomogeneous_solution: eta must be a non-constant harmonic function");
  }
  const Expr rho = grad_sq(eta);
  SingularSet s;
  s.add_band("zero of |grad eta|^2", rho);
  s.add_below("lambda * eta <= 0", lambda * eta);
  SolutionEntry e;
  e.id = "liouville.inhomogeneous";
  e.tag = EquationTag::LiouvilleInhomogeneous;
  e.field = Field(ln(abs((3.0 / lambda) * rho / pow(eta, 3.0))) / lambda, {"x", "y"}, s);
  e.params = {{"lambda", lambda}};
  e.source = eta;
  e.provenance = "solution of Lap w = eta exp(lambda w) with eta = " + to_sexpr(eta) +
                 "; valid where lambda * eta > 0";
  e.domain = std::move(domain);
  return e;
}

SolutionEntry weighted_example() {
  const Expr x = var("x"), y = var("y");
  const Expr f = exp(square(x) - square(y));
  const SolutionEntry profile = one_dim_family(Family::TrigSh, 1.0, 0.5, 1.0);
  SolutionEntry e;
  e.id = "weighted.exp_quadratic";
  e.tag = EquationTag::Weighted;
  e.field = conformal_lift(f, profile.field);
  e.params = profile.params;
  e.weight = f;
  e.provenance = "conformal lift u = 4 (x^2 + y^2) exp(x^2 - y^2) v(x^2 - y^2, t) of the "
                 "trig_sh profile for the weight exp(x^2 - y^2)";
  e.domain = {{"x", {-1.0, 1.0}}, {"y", {-1.0, 1.0}}, {"t", {0.1, 2.0}}};
  return e;
}

// ---------------------------------------------------------------------------

Catalog::Catalog(std::vector<SolutionEntry> entries) : entries_(std::move(entries)) {}

const Catalog& Catalog::standard() {
  static const Catalog catalog = [] {
    std::vector<SolutionEntry> all;
    all.push_back(base_seed());
    for (auto& e : planar_solutions()) all.push_back(std::move(e));
    all.push_back(one_dim_family(Family::TrigSh, 1.0, 0.5, 1.0));
    all.push_back(one_dim_family(Family::TrigCos, 1.0, 0.5, 1.0));
    all.push_back(one_dim_family(Family::HypCos, 2.0, 1.0, 1.0));
    all.push_back(one_dim_family(Family::HypSh, 2.0, 1.0, 1.0));
    const Expr saddle = 2.0 * var("x") * var("y");
    all.push_back(liouville_solutions(1.0, 1.0, saddle, LiouvilleKind::Sec));
    all.push_back(liouville_solutions(1.0, -1.0, saddle, LiouvilleKind::Sech));
    all.push_back(liouville_inhomogeneous_solution(1.0, saddle));
    all.push_back(weighted_example());
    return Catalog(std::move(all));
  }();
  return catalog;
}

const SolutionEntry* Catalog::find(std::string_view id) const {
  for (const auto& e : entries_) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

const SolutionEntry& Catalog::at(std::string_view id) const {
  if (const auto* e = find(id)) return *e;
  throw UsageError("unknown catalog entry '" + std::string(id) + "'");
}

std::vector<const SolutionEntry*> Catalog::with_tag(EquationTag tag) const {
  std::vector<const SolutionEntry*> out;
  for (const auto& e : entries_) {
    if (e.tag == tag) out.push_back(&e);
  }
  return out;
}

}  // namespace fastdiff
