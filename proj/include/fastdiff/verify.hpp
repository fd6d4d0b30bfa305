#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fastdiff/catalog.hpp"
#include "fastdiff/field.hpp"
#include "fastdiff/transform.hpp"

namespace fastdiff {

struct SampleSpec {
  Box box;
  std::size_t count = 1000;
  std::uint64_t seed = 1;
  /// Half-width passed to singular-set predicates.
  double margin = 1e-3;
};

/// Statistics of one residual sweep. The relative residual of a sample is
/// |r| / (1 + sum of magnitudes of the equation's individual terms).
struct ResidualReport {
  double max_abs = 0.0;
  double max_rel = 0.0;
  std::size_t n_evaluated = 0;
  std::size_t n_skipped_singular = 0;
  Point argmax;
};

nlohmann::json to_json(const ResidualReport& r);

struct PointResidual {
  double residual = 0.0;
  double scale = 1.0;
};

/// Per-sample evaluator; nullopt marks a skipped sample.
using PointOracle = std::function<std::optional<std::vector<PointResidual>>(const Point&)>;

/// Deterministic uniform sampler over a Box (SplitMix64, variables drawn in
/// key order).
class BoxSampler {
 public:
  BoxSampler(const Box& box, std::uint64_t seed);
  Point next();

 private:
  double uniform();
  Box box_;
  std::uint64_t state_;
};

/// Runs `oracle` on spec.count samples; points inside `singular` (at
/// spec.margin) are skipped and counted. Throws EmptyReport when every sample
/// is skipped.
std::vector<ResidualReport> sweep(const SampleSpec& spec, const SingularSet& singular,
                                  std::size_t components, const PointOracle& oracle);

enum class Derivatives { Exact, FiniteDifference };

/// Central difference of order 1 or 2 with one Richardson refinement.
/// nullopt when a stencil point is singular.
std::optional<double> fd_derivative_oracle(const Field& field, const std::string& var, int order,
                                           const Point& p, double step);

/// Step used when residuals are computed with Derivatives::FiniteDifference.
inline constexpr double kFdResidualStep = 1e-4;

/// u_t - Lap ln u over the first two signature variables of u.
ResidualReport fast_diffusion_residual(const Field& u, const SampleSpec& spec,
                                       Derivatives mode = Derivatives::Exact);

/// u_t - f Lap ln u.
ResidualReport weighted_residual(const Field& u, const Expr& weight, const SampleSpec& spec,
                                 Derivatives mode = Derivatives::Exact);

/// v_t - (ln v)_ee for v over (eta, t).
ResidualReport reduced_residual(const Field& v, const SampleSpec& spec,
                                Derivatives mode = Derivatives::Exact);

/// w_t - w w_ee + w_e^2 for w over (eta, t).
ResidualReport quadratic_form_residual(const Field& w, const SampleSpec& spec,
                                       Derivatives mode = Derivatives::Exact);

/// u_t - Lap ln u + lambda u.
ResidualReport sink_residual(const Field& u, double lambda, const SampleSpec& spec,
                             Derivatives mode = Derivatives::Exact);

/// Lap w - exp(lambda w), or Lap w - source exp(lambda w).
ResidualReport liouville_residual(const Field& w, double lambda,
                                  const std::optional<Expr>& source, const SampleSpec& spec,
                                  Derivatives mode = Derivatives::Exact);

/// Components (Lap u - e^u - A|grad phi|^2, Lap v - e^v + B|grad phi|^2,
/// Lap phi - e^v + e^u) for fields over (x, y).
std::array<ResidualReport, 3> charge_transfer_residual(const Field& u, const Field& v,
                                                       const Field& phi, double A, double B,
                                                       const SampleSpec& spec,
                                                       Derivatives mode = Derivatives::Exact);

/// u_i,t - Lap ln u_i - f_i(u_1..u_m) for fields over (x, y, t).
std::vector<ResidualReport> system_residual(std::span<const Field> u, const SourceTerm& f,
                                            const SampleSpec& spec,
                                            Derivatives mode = Derivatives::Exact);

/// SampleSpec over the entry's default domain.
SampleSpec default_spec(const SolutionEntry& entry, std::size_t count = 1000,
                        std::uint64_t seed = 1);

/// Residual of the entry under the operator selected by its equation tag.
/// An empty spec.box falls back to the entry's domain.
ResidualReport entry_residual(const SolutionEntry& entry, SampleSpec spec,
                              Derivatives mode = Derivatives::Exact);

/// The entry with its field shifted by +epsilon.
SolutionEntry perturbed(const SolutionEntry& entry, double epsilon);

}  // namespace fastdiff
