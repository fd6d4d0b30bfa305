#pragma once

#include <optional>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "fastdiff/catalog.hpp"
#include "fastdiff/harmonic.hpp"

namespace fastdiff::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kUsage = 2, kEmpty = 3 };

/// {"kind": "monomial", "n": 3}, {"kind": "exponential", "k": 1},
/// {"kind": "affine", "a", "b", "c", "d"}, {"kind": "sinh"}, {"kind": "cos"},
/// or {"kind": "custom", "xi": sexpr, "eta": sexpr}.
HarmonicPair pair_from_json(const nlohmann::json& j);

/// A solved construction together with the chain of steps that produced it.
struct Resolved {
  SolutionEntry entry;
  nlohmann::json provenance = nlohmann::json::array();
};

/// Resolves a catalog id, an inline {"expr", "signature", "equation"}, a
/// parametrised reference ({"family"...}, {"kind": "sec"|"sech"...},
/// {"inhomogeneous"...}) or a nested recipe ({"op"...}).
Resolved resolve_reference(const nlohmann::json& ref);

/// Applies a recipe {"op", "pair", "seed", "params", "domain"}.
Resolved resolve_recipe(const nlohmann::json& recipe);

nlohmann::json catalog_listing(const std::optional<std::string>& tag);

/// Output of `construct`: expression, signature, tag, singular set and provenance.
nlohmann::json construction_json(const Resolved& r);

/// Runs one `solve` config; writes grid.csv and convergence.json into
/// `out_dir` and returns the convergence JSON (with a "pass" member).
nlohmann::json run_solve(const nlohmann::json& config, const std::string& out_dir);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fastdiff::cli
