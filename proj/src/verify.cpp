#include "fastdiff/verify.hpp"

#include <cmath>

#include "fastdiff/error.hpp"

namespace fastdiff {

namespace {

constexpr double kPositivityFloor = 1e-12;

/// Value and partial derivatives of a field by either derivative route.
class Probe {
 public:
  Probe(const Field& f, Derivatives mode) : field_(f), mode_(mode) {}

  double value(const Point& p) const { return field_.value(p); }

  double d1(const std::string& v, const Point& p) const { return d(v, 1, p); }
  double d2(const std::string& v, const Point& p) const { return d(v, 2, p); }

 private:
  double d(const std::string& v, int order, const Point& p) const {
    if (mode_ == Derivatives::Exact) {
      return order == 1 ? field_.derivative({v}, p) : field_.derivative({v, v}, p);
    }
    auto r = fd_derivative_oracle(field_, v, order, p, kFdResidualStep);
    if (!r) throw SingularEvaluation("finite-difference stencil is singular", v);
    return *r;
  }

  const Field& field_;
  Derivatives mode_;
};

/// Lap ln u in (a, b) and the magnitudes of its four constituent terms.
struct LogLaplacian {
  double value;
  double terms;
};

LogLaplacian log_laplacian(const Probe& u, double uv, const std::string& a, const std::string& b,
                           const Point& p) {
  const double ua = u.d1(a, p), ub = u.d1(b, p);
  const double uaa = u.d2(a, p) / uv, ubb = u.d2(b, p) / uv;
  const double ga = (ua / uv) * (ua / uv), gb = (ub / uv) * (ub / uv);
  return {uaa + ubb - ga - gb, std::fabs(uaa) + std::fabs(ubb) + ga + gb};
}

std::optional<std::vector<PointResidual>> single(double r, double terms) {
  return std::vector<PointResidual>{{r, 1.0 + terms}};
}

const std::string& spatial(const Field& f, std::size_t i) {
  if (f.signature().size() <= i) throw UsageError("field has too few spatial variables");
  return f.signature()[i];
}

void require_time(const Field& f) {
  if (f.signature().empty() || f.signature().back() != "t") {
    throw UsageError("expected a field whose last signature variable is t");
  }
}

Box complete_box(const Box& box, const Field& f) {
  for (const auto& v : f.signature()) {
    if (!box.count(v)) throw UsageError("sample box does not cover variable '" + v + "'");
  }
  return box;
}

ResidualReport sweep_one(const SampleSpec& spec, const Field& f, const PointOracle& oracle) {
  SampleSpec s = spec;
  s.box = complete_box(spec.box, f);
  return sweep(s, f.singular_set(), 1, oracle).front();
}

}  // namespace

nlohmann::json to_json(const ResidualReport& r) {
  nlohmann::json j;
  j["max_abs"] = r.max_abs;
  j["max_rel"] = r.max_rel;
  j["n_evaluated"] = r.n_evaluated;
  j["n_skipped_singular"] = r.n_skipped_singular;
  nlohmann::json arg = nlohmann::json::object();
  for (const auto& [k, v] : r.argmax) arg[k] = v;
  j["argmax"] = arg;
  return j;
}

// ---------------------------------------------------------------------------

BoxSampler::BoxSampler(const Box& box, std::uint64_t seed) : box_(box), state_(seed) {
  for (const auto& [name, iv] : box_) {
    if (!(iv.hi > iv.lo)) throw UsageError("degenerate sample interval for '" + name + "'");
  }
}

double BoxSampler::uniform() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

Point BoxSampler::next() {
  Point p;
  for (const auto& [name, iv] : box_) p.emplace(name, iv.lo + iv.width() * uniform());
  return p;
}

std::vector<ResidualReport> sweep(const SampleSpec& spec, const SingularSet& singular,
                                  std::size_t components, const PointOracle& oracle) {
  if (spec.count == 0) throw UsageError("sample count must be at least 1");
  BoxSampler sampler(spec.box, spec.seed);
  std::vector<ResidualReport> out(components);
  std::size_t skipped = 0, evaluated = 0;
  for (std::size_t i = 0; i < spec.count; ++i) {
    const Point p = sampler.next();
    std::optional<std::vector<PointResidual>> r;
    if (!singular.contains(p, spec.margin)) {
      try {
        r = oracle(p);
      } catch (const SingularEvaluation&) {
        r.reset();
      }
    }
    if (!r) {
      ++skipped;
      continue;
    }
    if (r->size() != components) throw UsageError("oracle returned the wrong component count");
    ++evaluated;
    for (std::size_t c = 0; c < components; ++c) {
      const double abs_r = std::fabs((*r)[c].residual);
      const double rel = abs_r / (*r)[c].scale;
      auto& rep = out[c];
      if (!(abs_r <= rep.max_abs)) rep.max_abs = std::isnan(abs_r) ? INFINITY : abs_r;
      if (!(rel <= rep.max_rel)) {
        rep.max_rel = std::isnan(rel) ? INFINITY : rel;
        rep.argmax = p;
      }
    }
  }
  if (evaluated == 0) {
    throw EmptyReport("all " + std::to_string(spec.count) +
                      " samples were skipped as singular or non-positive");
  }
  for (auto& rep : out) {
    rep.n_evaluated = evaluated;
    rep.n_skipped_singular = skipped;
  }
  return out;
}

std::optional<double> fd_derivative_oracle(const Field& field, const std::string& var, int order,
                                           const Point& p, double step) {
  if (order != 1 && order != 2) throw UsageError("fd_derivative_oracle: order must be 1 or 2");
  if (!(step > 0.0)) throw UsageError("fd_derivative_oracle: step must be positive");
  auto it = p.find(var);
  if (it == p.end()) throw UsageError("fd_derivative_oracle: point does not bind '" + var + "'");
  const double x0 = it->second;
  auto at = [&](double offset) -> std::optional<double> {
    Point q = p;
    q[var] = x0 + offset;
    if (field.singular_set().contains(q, step)) return std::nullopt;
    try {
      return field.value(q);
    } catch (const SingularEvaluation&) {
      return std::nullopt;
    }
  };
  auto central = [&](double h) -> std::optional<double> {
    const auto fp = at(h), fm = at(-h);
    if (!fp || !fm) return std::nullopt;
    if (order == 1) return (*fp - *fm) / (2.0 * h);
    const auto f0 = at(0.0);
    if (!f0) return std::nullopt;
    return (*fp - 2.0 * *f0 + *fm) / (h * h);
  };
  const auto coarse = central(step);
  const auto fine = central(0.5 * step);
  if (!coarse || !fine) return std::nullopt;
  return (4.0 * *fine - *coarse) / 3.0;
}

// ---------------------------------------------------------------------------
// Oracles

ResidualReport fast_diffusion_residual(const Field& u, const SampleSpec& spec, Derivatives mode) {
  require_time(u);
  const std::string a = spatial(u, 0), b = spatial(u, 1);
  const Probe probe(u, mode);
  return sweep_one(spec, u, [&](const Point& p) -> std::optional<std::vector<PointResidual>> {
    const double uv = probe.value(p);
    if (uv <= kPositivityFloor) return std::nullopt;
    const double ut = probe.d1("t", p);
    const auto lap = log_laplacian(probe, uv, a, b, p);
    return single(ut - lap.value, std::fabs(ut) + lap.terms);
  });
}

ResidualReport weighted_residual(const Field& u, const Expr& weight, const SampleSpec& spec,
                                 Derivatives mode) {
  require_time(u);
  const std::string a = spatial(u, 0), b = spatial(u, 1);
  const Probe probe(u, mode);
  const CompiledExpr f(weight);
  return sweep_one(spec, u, [&](const Point& p) -> std::optional<std::vector<PointResidual>> {
    const double uv = probe.value(p);
    if (uv <= kPositivityFloor) return std::nullopt;
    const double ut = probe.d1("t", p);
    const double fv = f(p);
    const auto lap = log_laplacian(probe, uv, a, b, p);
    return single(ut - fv * lap.value, std::fabs(ut) + std::fabs(fv) * lap.terms);
  });
}

ResidualReport reduced_residual(const Field& v, const SampleSpec& spec, Derivatives mode) {
  require_time(v);
  const std::string e = spatial(v, 0);
  const Probe probe(v, mode);
  return sweep_one(spec, v, [&](const Point& p) -> std::optional<std::vector<PointResidual>> {
    const double vv = probe.value(p);
    if (vv <= kPositivityFloor) return std::nullopt;
    const double vt = probe.d1("t", p);
    const double ve = probe.d1(e, p) / vv;
    const double vee = probe.d2(e, p) / vv;
    return single(vt - vee + ve * ve, std::fabs(vt) + std::fabs(vee) + ve * ve);
  });
}

ResidualReport quadratic_form_residual(const Field& w, const SampleSpec& spec, Derivatives mode) {
  require_time(w);
  const std::string e = spatial(w, 0);
  const Probe probe(w, mode);
  return sweep_one(spec, w, [&](const Point& p) -> std::optional<std::vector<PointResidual>> {
    const double wv = probe.value(p);
    const double wt = probe.d1("t", p);
    const double we = probe.d1(e, p);
    const double wwee = wv * probe.d2(e, p);
    return single(wt - wwee + we * we, std::fabs(wt) + std::fabs(wwee) + we * we);
  });
}

ResidualReport sink_residual(const Field& u, double lambda, const SampleSpec& spec,
                             Derivatives mode) {
  require_time(u);
  const std::string a = spatial(u, 0), b = spatial(u, 1);
  const Probe probe(u, mode);
  return sweep_one(spec, u, [&](const Point& p) -> std::optional<std::vector<PointResidual>> {
    const double uv = probe.value(p);
    if (uv <= kPositivityFloor) return std::nullopt;
    const double ut = probe.d1("t", p);
    const auto lap = log_laplacian(probe, uv, a, b, p);
    return single(ut - lap.value + lambda * uv,
                  std::fabs(ut) + lap.terms + std::fabs(lambda * uv));
  });
}

ResidualReport liouville_residual(const Field& w, double lambda, const std::optional<Expr>& source,
                                  const SampleSpec& spec, Derivatives mode) {
  const std::string a = spatial(w, 0), b = spatial(w, 1);
  const Probe probe(w, mode);
  std::optional<CompiledExpr> src;
  if (source) src.emplace(*source);
  return sweep_one(spec, w, [&](const Point& p) -> std::optional<std::vector<PointResidual>> {
    const double wv = probe.value(p);
    const double waa = probe.d2(a, p), wbb = probe.d2(b, p);
    const double rhs = (src ? (*src)(p) : 1.0) * std::exp(lambda * wv);
    if (!std::isfinite(rhs)) return std::nullopt;
    return single(waa + wbb - rhs, std::fabs(waa) + std::fabs(wbb) + std::fabs(rhs));
  });
}

std::array<ResidualReport, 3> charge_transfer_residual(const Field& u, const Field& v,
                                                       const Field& phi, double A, double B,
                                                       const SampleSpec& spec, Derivatives mode) {
  SampleSpec s = spec;
  s.box = complete_box(spec.box, u);
  SingularSet singular = u.singular_set();
  singular.merge(v.singular_set()).merge(phi.singular_set());
  const Probe pu(u, mode), pv(v, mode), pphi(phi, mode);
  auto lap = [](const Probe& f, const Point& p) {
    const double fxx = f.d2("x", p), fyy = f.d2("y", p);
    return std::pair{fxx + fyy, std::fabs(fxx) + std::fabs(fyy)};
  };
  auto reports = sweep(s, singular, 3, [&](const Point& p) -> std::optional<std::vector<PointResidual>> {
    const double eu = std::exp(pu.value(p));
    const double ev = std::exp(pv.value(p));
    const double gx = pphi.d1("x", p), gy = pphi.d1("y", p);
    const double g2 = gx * gx + gy * gy;
    const auto [lu, tu] = lap(pu, p);
    const auto [lv, tv] = lap(pv, p);
    const auto [lphi, tphi] = lap(pphi, p);
    return std::vector<PointResidual>{
        {lu - eu - A * g2, 1.0 + tu + eu + std::fabs(A) * g2},
        {lv - ev + B * g2, 1.0 + tv + ev + std::fabs(B) * g2},
        {lphi - ev + eu, 1.0 + tphi + ev + eu},
    };
  });
  return {reports[0], reports[1], reports[2]};
}

std::vector<ResidualReport> system_residual(std::span<const Field> u, const SourceTerm& f,
                                            const SampleSpec& spec, Derivatives mode) {
  if (u.empty()) throw UsageError("system_residual: no fields");
  SampleSpec s = spec;
  s.box = complete_box(spec.box, u.front());
  SingularSet singular;
  std::vector<Probe> probes;
  probes.reserve(u.size());
  for (const auto& ui : u) {
    require_time(ui);
    singular.merge(ui.singular_set());
    probes.emplace_back(ui, mode);
  }
  const std::string a = spatial(u.front(), 0), b = spatial(u.front(), 1);
  return sweep(s, singular, u.size(), [&](const Point& p) -> std::optional<std::vector<PointResidual>> {
    std::vector<double> values(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      values[i] = probes[i].value(p);
      if (values[i] <= kPositivityFloor) return std::nullopt;
    }
    const auto src = f.evaluate(std::span<const double>(values.data(), f.arity));
    std::vector<PointResidual> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double ut = probes[i].d1("t", p);
      const auto lap = log_laplacian(probes[i], values[i], a, b, p);
      out[i] = {ut - lap.value - src[i], 1.0 + std::fabs(ut) + lap.terms + std::fabs(src[i])};
    }
    return out;
  });
}

SampleSpec default_spec(const SolutionEntry& entry, std::size_t count, std::uint64_t seed) {
  SampleSpec s;
  s.box = entry.domain;
  s.count = count;
  s.seed = seed;
  return s;
}

ResidualReport entry_residual(const SolutionEntry& entry, SampleSpec spec, Derivatives mode) {
  if (spec.box.empty()) spec.box = entry.domain;
  switch (entry.tag) {
    case EquationTag::Fast2d:
      return fast_diffusion_residual(entry.field, spec, mode);
    case EquationTag::Fast1d:
      return reduced_residual(entry.field, spec, mode);
    case EquationTag::Weighted:
      if (!entry.weight) throw UsageError("weighted entry '" + entry.id + "' has no weight");
      return weighted_residual(entry.field, *entry.weight, spec, mode);
    case EquationTag::Liouville:
      return liouville_residual(entry.field, entry.param("lambda"), std::nullopt, spec, mode);
    case EquationTag::LiouvilleInhomogeneous:
      return liouville_residual(entry.field, entry.param("lambda"), entry.source, spec, mode);
    case EquationTag::ChargeTransfer:
      break;
  }
  throw UsageError("entry '" + entry.id + "' has no single-field residual operator");
}

SolutionEntry perturbed(const SolutionEntry& entry, double epsilon) {
  SolutionEntry out = entry;
  out.field = Field(entry.field.expr() + epsilon, entry.field.signature(),
                    entry.field.singular_set());
  return out;
}

}  // namespace fastdiff
