#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fastdiff/field.hpp"

namespace fastdiff {

enum class EquationTag {
  Fast2d,                  // u_t = Lap ln u
  Fast1d,                  // v_t = (ln v)_ee
  Weighted,                // u_t = f Lap ln u
  Liouville,               // Lap w = exp(lambda w)
  LiouvilleInhomogeneous,  // Lap w = eta exp(lambda w)
  ChargeTransfer,          // three-field elliptic system with Poisson coupling
};

std::string_view to_string(EquationTag tag);
std::optional<EquationTag> parse_equation_tag(std::string_view text);

struct SolutionEntry {
  std::string id;
  EquationTag tag = EquationTag::Fast2d;
  Field field;
  std::map<std::string, double> params;
  std::string provenance;
  /// Default sampling box over every signature variable.
  Box domain;
  /// Weight f for EquationTag::Weighted.
  std::optional<Expr> weight;
  /// Source eta for EquationTag::LiouvilleInhomogeneous.
  std::optional<Expr> source;

  const SingularSet& singular_set() const noexcept { return field.singular_set(); }
  double param(const std::string& name) const { return params.at(name); }
};

/// v(xi, eta, t) = 2 tanh t / (xi^2 + eta^2 tanh^2 t).
SolutionEntry base_seed();

/// Four anisotropic solutions of u_t = Lap ln u obtained by branching the
/// seed: coth/tan and tan/tanh arguments, the cubic-argument form, and the
/// exp(3z) form with its corrected prefactor.
std::vector<SolutionEntry> planar_solutions();

/// The exp(3z) solution with the prefactor 18 exp(x) exactly as printed,
/// kept as a negative control for the residual oracle.
SolutionEntry exp3_as_printed();

enum class Family { TrigSh, TrigCos, HypCos, HypSh };

std::string_view to_string(Family f);
std::optional<Family> parse_family(std::string_view text);

/// One-dimensional profiles v(eta, t) of v_t = (ln v)_ee.
SolutionEntry one_dim_family(Family family, double k1, double k2, double lambda);

enum class LiouvilleKind { Sec, Sech };

/// w = ln|(2A^2/lambda) |grad eta|^2 sec^2(A eta)| / lambda (or sech^2).
/// The sec form solves Lap w = exp(lambda w) for lambda > 0 and the sech form
/// for lambda < 0; the other sign is constructible but does not solve it.
SolutionEntry liouville_solutions(double A, double lambda, const Expr& eta, LiouvilleKind kind,
                                  Box domain = {{"x", {-1.0, 1.0}}, {"y", {-1.0, 1.0}}});

bool liouville_sign_consistent(LiouvilleKind kind, double lambda);

/// w = ln|(3/lambda) |grad eta|^2 / eta^3| / lambda, solving
/// Lap w = eta exp(lambda w) where lambda * eta > 0.
SolutionEntry liouville_inhomogeneous_solution(
    double lambda, const Expr& eta, Box domain = {{"x", {-1.5, 1.5}}, {"y", {-1.5, 1.5}}});

/// Conformal lift of the trig_sh profile for the weight exp(x^2 - y^2).
SolutionEntry weighted_example();

class Catalog {
 public:
  /// All default entries; built once.
  static const Catalog& standard();

  explicit Catalog(std::vector<SolutionEntry> entries);

  const std::vector<SolutionEntry>& entries() const noexcept { return entries_; }
  const SolutionEntry* find(std::string_view id) const;
  const SolutionEntry& at(std::string_view id) const;
  std::vector<const SolutionEntry*> with_tag(EquationTag tag) const;

 private:
  std::vector<SolutionEntry> entries_;
};

}  // namespace fastdiff
