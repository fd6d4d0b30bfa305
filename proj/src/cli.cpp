#include "fastdiff/cli.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "fastdiff/error.hpp"
#include "fastdiff/solver.hpp"
#include "fastdiff/transform.hpp"
#include "fastdiff/verify.hpp"

namespace fastdiff::cli {

using nlohmann::json;

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed JSON in '" + path + "': " + e.what());
  }
}

template <class T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) throw UsageError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(std::string("field '") + key + "' has the wrong type");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? get<T>(j, key) : fallback;
}

Expr expr_field(const json& j, const char* key) { return parse_sexpr(get<std::string>(j, key)); }

Interval interval_from(const json& j, const std::string& name) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw UsageError("interval for '" + name + "' must be [lo, hi]");
  }
  Interval iv{j[0].get<double>(), j[1].get<double>()};
  if (!(iv.hi > iv.lo)) throw UsageError("interval for '" + name + "' must have lo < hi");
  return iv;
}

Box box_from(const json& j) {
  if (!j.is_object()) throw UsageError("domain must be an object of [lo, hi] intervals");
  Box b;
  for (const auto& [k, v] : j.items()) b[k] = interval_from(v, k);
  return b;
}

std::map<std::string, double> numeric_params(const json& params) {
  std::map<std::string, double> out;
  if (!params.is_object()) return out;
  for (const auto& [k, v] : params.items()) {
    if (v.is_number()) out[k] = v.get<double>();
  }
  return out;
}

/// Renames the spatial variables of a field over (x, y[, t]) to (xi, eta[, t]).
Field to_seed_coordinates(const Field& f) {
  const auto& sig = f.signature();
  if (sig.size() >= 2 && sig[0] == "xi" && sig[1] == "eta") return f;
  if (sig.size() >= 2 && sig[0] == "x" && sig[1] == "y") return f.rename({{"x", "xi"}, {"y", "eta"}});
  throw UsageError("seed must be a field over (xi, eta, ...) or (x, y, ...)");
}

Box default_planar_box(const SolutionEntry& seed, bool with_time) {
  Box b = {{"x", {-1.0, 1.0}}, {"y", {-1.0, 1.0}}};
  if (with_time) {
    auto it = seed.domain.find("t");
    b["t"] = it != seed.domain.end() ? it->second : Interval{0.5, 1.0};
  }
  return b;
}

SolutionEntry inline_entry(const json& j) {
  SolutionEntry e;
  e.id = "inline";
  const auto sig = get<std::vector<std::string>>(j, "signature");
  e.field = Field(expr_field(j, "expr"), sig);
  if (j.contains("equation")) {
    const auto tag = parse_equation_tag(get<std::string>(j, "equation"));
    if (!tag) throw UsageError("unknown equation tag '" + get<std::string>(j, "equation") + "'");
    e.tag = *tag;
  } else if (sig.size() == 2 && sig[1] == "t") {
    e.tag = EquationTag::Fast1d;
  } else if (sig.size() == 2) {
    e.tag = EquationTag::Liouville;
  }
  e.params = numeric_params(j.value("params", json::object()));
  if (j.contains("domain")) e.domain = box_from(j.at("domain"));
  e.provenance = "inline expression";
  return e;
}

}  // namespace

HarmonicPair pair_from_json(const json& j) {
  if (j.is_string()) return pair_from_json(json{{"kind", j}});
  const auto kind = get<std::string>(j, "kind");
  if (kind == "monomial") return harmonic_pair(pair_kind::Monomial{get<int>(j, "n")});
  if (kind == "exponential") return harmonic_pair(pair_kind::Exponential{get<double>(j, "k")});
  if (kind == "affine") {
    return harmonic_pair(pair_kind::Affine{get_or(j, "a", 1.0), get_or(j, "b", 0.0),
                                           get_or(j, "c", 0.0), get_or(j, "d", 0.0)});
  }
  const Expr x = var("x"), y = var("y");
  if (kind == "sinh") {
    return harmonic_pair(pair_kind::Custom{sinh(x) * cos(y), cosh(x) * sin(y), {}, "sinh z"});
  }
  if (kind == "cos") {
    return harmonic_pair(pair_kind::Custom{cos(x) * cosh(y), -(sin(x) * sinh(y)), {}, "cos z"});
  }
  if (kind == "custom") {
    pair_kind::Custom c{expr_field(j, "xi"), expr_field(j, "eta"), {},
                        get_or<std::string>(j, "description", "custom")};
    return harmonic_pair(c);
  }
  throw UsageError("unknown pair kind '" + kind + "'");
}

Resolved resolve_reference(const json& ref) {
  Resolved r;
  if (ref.is_string()) {
    r.entry = Catalog::standard().at(ref.get<std::string>());
    r.provenance.push_back({{"step", "catalog"}, {"id", r.entry.id}, {"note", r.entry.provenance}});
    return r;
  }
  if (!ref.is_object()) throw UsageError("reference must be a catalog id or an object");
  if (ref.contains("op")) return resolve_recipe(ref);
  if (ref.contains("expr")) {
    r.entry = inline_entry(ref);
    r.provenance.push_back({{"step", "inline"}, {"expression", to_sexpr(r.entry.field.expr())}});
    return r;
  }
  if (ref.contains("family")) {
    const auto name = get<std::string>(ref, "family");
    const auto fam = parse_family(name);
    if (!fam) throw UsageError("unknown family '" + name + "'");
    r.entry = one_dim_family(*fam, get_or(ref, "k1", 1.0), get_or(ref, "k2", 0.0),
                             get_or(ref, "lambda", 1.0));
  } else if (ref.contains("kind")) {
    const auto name = get<std::string>(ref, "kind");
    if (name != "sec" && name != "sech") throw UsageError("unknown Liouville kind '" + name + "'");
    const auto kind = name == "sec" ? LiouvilleKind::Sec : LiouvilleKind::Sech;
    r.entry = liouville_solutions(get_or(ref, "A", 1.0), get_or(ref, "lambda", 1.0),
                                  expr_field(ref, "eta"), kind);
  } else if (ref.contains("inhomogeneous")) {
    const auto& p = ref.at("inhomogeneous");
    r.entry = liouville_inhomogeneous_solution(get_or(p, "lambda", 1.0), expr_field(p, "eta"));
  } else {
    throw UsageError("reference object needs one of op, expr, family, kind, inhomogeneous");
  }
  if (ref.contains("domain")) r.entry.domain = box_from(ref.at("domain"));
  r.provenance.push_back({{"step", "parametrised"}, {"id", r.entry.id},
                          {"params", r.entry.params}, {"note", r.entry.provenance}});
  return r;
}

Resolved resolve_recipe(const json& recipe) {
  if (!recipe.is_object()) throw UsageError("recipe must be a JSON object");
  const auto op = get<std::string>(recipe, "op");
  if (!recipe.contains("seed")) throw UsageError("recipe is missing 'seed'");
  Resolved seed = resolve_reference(recipe.at("seed"));
  const json params = recipe.value("params", json::object());
  if (!params.is_object()) throw UsageError("recipe 'params' must be an object");

  Resolved out;
  out.provenance = seed.provenance;
  SolutionEntry& e = out.entry;
  json step = {{"step", op}};

  if (op == "branch") {
    const HarmonicPair pair = pair_from_json(get<json>(recipe, "pair"));
    if (seed.entry.tag != EquationTag::Fast2d) throw UsageError("branch needs a fast2d seed");
    e.field = branch(pair, to_seed_coordinates(seed.entry.field));
    e.tag = EquationTag::Fast2d;
    e.domain = default_planar_box(seed.entry, true);
    step["pair"] = pair.description;
  } else if (op == "reduce") {
    if (seed.entry.tag != EquationTag::Fast1d) throw UsageError("reduce needs a fast1d seed");
    Expr eta = recipe.contains("eta") ? expr_field(recipe, "eta")
               : params.contains("eta") ? expr_field(params, "eta")
                                        : pair_from_json(get<json>(recipe, "pair")).eta;
    e.field = reduce_via_harmonic(eta, seed.entry.field);
    e.tag = EquationTag::Fast2d;
    e.domain = default_planar_box(seed.entry, true);
    step["eta"] = to_sexpr(eta);
  } else if (op == "conformal") {
    if (seed.entry.tag != EquationTag::Fast1d) throw UsageError("conformal needs a fast1d seed");
    const Expr f = expr_field(params, "f");
    e.field = conformal_lift(f, seed.entry.field);
    e.tag = EquationTag::Weighted;
    e.weight = f;
    e.domain = default_planar_box(seed.entry, true);
    step["weight"] = to_sexpr(f);
  } else if (op == "liouville_shift") {
    if (seed.entry.tag != EquationTag::Liouville) {
      throw UsageError("liouville_shift needs a liouville seed");
    }
    const HarmonicPair pair = pair_from_json(get<json>(recipe, "pair"));
    const double lambda = params.contains("lambda") ? get<double>(params, "lambda")
                                                    : seed.entry.param("lambda");
    e.field = liouville_shift(pair, to_seed_coordinates(seed.entry.field), lambda);
    e.tag = EquationTag::Liouville;
    e.params["lambda"] = lambda;
    e.domain = default_planar_box(seed.entry, false);
    step["pair"] = pair.description;
    step["lambda"] = lambda;
  } else {
    throw UsageError("unknown recipe op '" + op + "' (expected branch, reduce, conformal or "
                     "liouville_shift)");
  }
  for (const auto& [k, v] : numeric_params(params)) e.params.try_emplace(k, v);
  if (recipe.contains("domain")) e.domain = box_from(recipe.at("domain"));
  e.id = get_or<std::string>(recipe, "id", op + "(" + seed.entry.id + ")");
  e.provenance = op + " of " + seed.entry.id;
  out.provenance.push_back(step);
  return out;
}

json catalog_listing(const std::optional<std::string>& tag) {
  json list = json::array();
  std::optional<EquationTag> wanted;
  if (tag) {
    wanted = parse_equation_tag(*tag);
    if (!wanted) return list;
  }
  for (const auto& e : Catalog::standard().entries()) {
    if (wanted && e.tag != *wanted) continue;
    list.push_back({{"id", e.id},
                    {"equation_tag", std::string(to_string(e.tag))},
                    {"params", e.params},
                    {"provenance", e.provenance},
                    {"signature", e.field.signature()},
                    {"singular_set_description", e.singular_set().describe()}});
  }
  return list;
}

json construction_json(const Resolved& r) {
  json j = {{"id", r.entry.id},
            {"equation_tag", std::string(to_string(r.entry.tag))},
            {"expression", to_sexpr(r.entry.field.expr())},
            {"signature", r.entry.field.signature()},
            {"params", r.entry.params},
            {"singular_set_description", r.entry.singular_set().describe()},
            {"provenance", r.provenance}};
  if (r.entry.weight) j["weight"] = to_sexpr(*r.entry.weight);
  json domain = json::object();
  for (const auto& [k, iv] : r.entry.domain) domain[k] = {iv.lo, iv.hi};
  j["domain"] = domain;
  return j;
}

// ---------------------------------------------------------------------------
// solve

namespace {

double step_for(const json& config, double h) {
  const json& dt = get<json>(config, "dt");
  double v = 0.0;
  if (dt.is_number()) {
    v = dt.get<double>();
  } else if (dt.is_object()) {
    v = get_or(dt, "scale", 1.0) * std::pow(h, get_or(dt, "h_power", 2.0));
  } else {
    throw UsageError("dt must be a number or {\"scale\", \"h_power\"}");
  }
  if (!(v > 0.0)) throw ParameterError("dt must be positive");
  return v;
}

TimeScheme scheme_from(const json& config) {
  const auto s = get_or<std::string>(config, "scheme", "crank_nicolson");
  if (s == "crank_nicolson") return TimeScheme::CrankNicolson;
  if (s == "implicit_euler") return TimeScheme::ImplicitEuler;
  throw UsageError("unknown scheme '" + s + "'");
}

std::vector<std::size_t> ladder_from(const json& config) {
  const json& g = get<json>(config, "grid");
  std::vector<std::size_t> out;
  if (g.is_number_unsigned()) {
    out.push_back(g.get<std::size_t>());
  } else if (g.is_array()) {
    for (const auto& v : g) {
      if (!v.is_number_unsigned()) throw UsageError("grid sizes must be positive integers");
      out.push_back(v.get<std::size_t>());
    }
  } else {
    throw UsageError("grid must be a node count or a list of node counts");
  }
  if (out.empty()) throw UsageError("grid ladder is empty");
  for (auto n : out) {
    if (n < 3) throw ParameterError("grid needs at least 3 nodes per axis");
  }
  return out;
}

Interval axis(const json& domain, const char* name) {
  if (!domain.contains(name)) throw UsageError(std::string("domain is missing '") + name + "'");
  return interval_from(domain.at(name), name);
}

void write_grid_csv(const std::string& path, const std::vector<std::array<double, 3>>& rows) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << "x,y,value\n";
  for (const auto& r : rows) {
    out << format_double(r[0]) << ',' << format_double(r[1]) << ',' << format_double(r[2]) << '\n';
  }
}

}  // namespace

json run_solve(const json& config, const std::string& out_dir) {
  if (!config.is_object()) throw UsageError("solve config must be a JSON object");
  const auto equation = get<std::string>(config, "equation");
  const json ref = config.contains("reference") ? config.at("reference")
                                                : json(get<std::string>(config, "reference_id"));
  const Resolved resolved = resolve_reference(ref);
  const SolutionEntry& entry = resolved.entry;
  const auto ladder = ladder_from(config);
  const json domain = get<json>(config, "domain");
  const bool timed = equation != "liouville";
  const double t0 = timed ? get<double>(config, "t0") : 0.0;
  const double T = timed ? get<double>(config, "T") : 0.0;
  if (timed && !(T >= t0)) throw ParameterError("T must not precede t0");

  std::vector<double> spacings, errors;
  std::vector<int> newton;
  std::vector<std::array<double, 3>> rows;

  for (std::size_t level = 0; level < ladder.size(); ++level) {
    const std::size_t n = ladder[level];
    const bool finest = level + 1 == ladder.size();
    rows.clear();
    if (equation == "fast1d") {
      const Interval r = axis(domain, "eta");
      const double h = r.width() / static_cast<double>(n - 1);
      SolverConfig c;
      c.dt = step_for(config, h);
      c.t0 = t0;
      c.t_final = T;
      c.scheme = scheme_from(config);
      const auto traj = solve_fast1d(entry.field, r, n, c);
      const auto& g = traj.final_state();
      spacings.push_back(h);
      errors.push_back(max_error(g, entry.field, T));
      newton.push_back(traj.max_newton_iterations);
      if (finest) {
        for (std::size_t i = 0; i < g.n; ++i) rows.push_back({g.node(i), T, g.values[i]});
      }
    } else if (equation == "fast2d" || equation == "weighted") {
      Fast2dProblem p;
      p.exact = entry.field;
      p.x = axis(domain, "x");
      p.y = axis(domain, "y");
      p.nx = p.ny = n;
      p.sink = get_or(config, "sink", 0.0);
      if (equation == "weighted") {
        if (!entry.weight) throw UsageError("reference has no weight for the weighted equation");
        p.weight = entry.weight;
      }
      const double h = p.x.width() / static_cast<double>(n - 1);
      SolverConfig c;
      c.dt = step_for(config, h);
      c.t0 = t0;
      c.t_final = T;
      c.scheme = scheme_from(config);
      const auto traj = solve_fast2d(p, c);
      const auto& g = traj.final_state();
      spacings.push_back(h);
      errors.push_back(max_error(g, entry.field, T));
      newton.push_back(traj.max_newton_iterations);
      if (finest) {
        for (std::size_t j = 0; j < g.ny; ++j)
          for (std::size_t i = 0; i < g.nx; ++i) rows.push_back({g.x_at(i), g.y_at(j), g.at(i, j)});
      }
    } else if (equation == "liouville") {
      LiouvilleProblem p;
      p.lambda = entry.param("lambda");
      p.source = entry.source;
      p.boundary = entry.field;
      p.x = axis(domain, "x");
      p.y = axis(domain, "y");
      p.nx = p.ny = n;
      p.newton_tol = get_or(config, "newton_tol", 1e-10);
      p.max_newton = get_or(config, "max_newton", 25);
      const auto res = solve_liouville(p);
      const auto& g = res.solution;
      spacings.push_back(p.x.width() / static_cast<double>(n - 1));
      errors.push_back(max_error(g, entry.field, std::nullopt));
      newton.push_back(res.iterations);
      if (finest) {
        for (std::size_t j = 0; j < g.ny; ++j)
          for (std::size_t i = 0; i < g.nx; ++i) rows.push_back({g.x_at(i), g.y_at(j), g.at(i, j)});
      }
    } else {
      throw UsageError("unknown equation '" + equation +
                       "' (expected fast1d, fast2d, weighted or liouville)");
    }
  }

  json band = config.value("order_band", json::array({1.5, 2.5}));
  if (!band.is_array() || band.size() != 2) throw UsageError("order_band must be [lo, hi]");
  json report;
  bool pass = true;
  if (ladder.size() >= 2) {
    const auto rep = convergence_study(
        spacings, [&](std::size_t i) { return errors[i]; }, band[0].get<double>(),
        band[1].get<double>());
    report = to_json(rep);
    pass = rep.ok();
  } else {
    report = {{"h", spacings}, {"errors", errors}, {"orders", json::array()}};
  }
  report["equation"] = equation;
  report["reference"] = entry.id;
  report["grid"] = ladder;
  report["newton_iterations"] = newton;
  if (config.contains("max_error")) {
    const double limit = get<double>(config, "max_error");
    report["max_error_limit"] = limit;
    pass = pass && errors.back() < limit;
  }
  report["pass"] = pass;

  std::filesystem::create_directories(out_dir);
  write_grid_csv((std::filesystem::path(out_dir) / "grid.csv").string(), rows);
  std::ofstream js(std::filesystem::path(out_dir) / "convergence.json");
  js << report.dump(2) << '\n';
  return report;
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t default_seed() {
  const char* env = std::getenv("FASTDIFF_SEED");
  if (!env || !*env) return 1;
  std::uint64_t v = 0;
  const std::string s(env);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError("FASTDIFF_SEED must be a non-negative integer");
  }
  return v;
}

void parse_box_arg(const std::string& text, Box& box) {
  const auto eq = text.find('=');
  const auto colon = text.find(':', eq == std::string::npos ? 0 : eq);
  if (eq == std::string::npos || colon == std::string::npos || eq == 0) {
    throw UsageError("--box expects var=lo:hi, got '" + text + "'");
  }
  try {
    std::size_t used = 0;
    const std::string lo_s = text.substr(eq + 1, colon - eq - 1);
    const std::string hi_s = text.substr(colon + 1);
    const double lo = std::stod(lo_s, &used);
    if (used != lo_s.size()) throw std::invalid_argument(lo_s);
    const double hi = std::stod(hi_s, &used);
    if (used != hi_s.size()) throw std::invalid_argument(hi_s);
    if (!(hi > lo)) throw UsageError("--box interval must have lo < hi: '" + text + "'");
    box[text.substr(0, eq)] = {lo, hi};
  } catch (const std::logic_error&) {
    throw UsageError("--box has a non-numeric bound: '" + text + "'");
  }
}

void emit(const json& j, std::ostream& out, const std::string& path) {
  if (path.empty()) {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << j.dump(2) << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact solutions of fast diffusion and Liouville equations: construction, "
               "residual verification and manufactured-solution solver studies",
               "fastdiff"};
  app.require_subcommand(1);

  auto* catalog = app.add_subcommand("catalog", "Inspect the built-in solution catalog");
  catalog->require_subcommand(1);
  auto* list = catalog->add_subcommand("list", "List entries as JSON");
  std::string tag;
  list->add_option("--tag", tag, "Keep entries with this equation tag");

  auto* construct = app.add_subcommand("construct", "Build a solution from a recipe");
  std::string recipe_path, out_path;
  construct->add_option("--recipe", recipe_path, "Recipe JSON file")->required();
  construct->add_option("--out", out_path, "Write the result here instead of stdout");

  auto* verify = app.add_subcommand("verify", "Residual sweep of a catalog entry or recipe");
  std::string verify_id, verify_recipe, derivatives = "exact";
  std::size_t samples = 1000;
  double tol = 1e-6, perturb = 0.0;
  std::optional<std::uint64_t> seed_arg;
  std::vector<std::string> box_args;
  auto* id_opt = verify->add_option("--id", verify_id, "Catalog entry id");
  auto* recipe_opt = verify->add_option("--recipe", verify_recipe, "Recipe JSON file");
  id_opt->excludes(recipe_opt);
  verify->add_option("--samples", samples, "Number of samples")->check(CLI::PositiveNumber);
  verify->add_option("--tol", tol, "Pass threshold on max_rel")->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed_arg, "Sampler seed (default: FASTDIFF_SEED or 1)");
  verify->add_option("--perturb", perturb, "Add this constant to the field");
  verify->add_option("--box", box_args, "Override a sample interval: var=lo:hi");
  verify->add_option("--derivatives", derivatives, "exact or fd")
      ->check(CLI::IsMember({"exact", "fd"}));

  auto* solve = app.add_subcommand("solve", "Run a solver convergence study");
  std::string config_path, out_dir;
  solve->add_option("--config", config_path, "Solver config JSON file")->required();
  solve->add_option("--out-dir", out_dir, "Directory for grid.csv and convergence.json")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (list->parsed()) {
      out << catalog_listing(tag.empty() ? std::nullopt : std::optional(tag)).dump(2) << '\n';
      return kPass;
    }
    if (construct->parsed()) {
      emit(construction_json(resolve_recipe(read_json_file(recipe_path))), out, out_path);
      return kPass;
    }
    if (verify->parsed()) {
      if (verify_id.empty() && verify_recipe.empty()) {
        throw UsageError("verify needs --id or --recipe");
      }
      Resolved target = verify_id.empty() ? resolve_recipe(read_json_file(verify_recipe))
                                          : resolve_reference(json(verify_id));
      if (perturb != 0.0) target.entry = perturbed(target.entry, perturb);
      const std::uint64_t seed = seed_arg ? *seed_arg : default_seed();
      SampleSpec spec = default_spec(target.entry, samples, seed);
      for (const auto& b : box_args) parse_box_arg(b, spec.box);
      const auto mode = derivatives == "fd" ? Derivatives::FiniteDifference : Derivatives::Exact;
      const ResidualReport rep = entry_residual(target.entry, spec, mode);
      const bool pass = rep.max_rel < tol;
      json j = {{"id", target.entry.id},
                {"equation_tag", std::string(to_string(target.entry.tag))},
                {"derivatives", derivatives},
                {"samples", samples},
                {"seed", seed},
                {"tol", tol},
                {"perturb", perturb},
                {"report", to_json(rep)},
                {"pass", pass}};
      out << j.dump(2) << '\n';
      return pass ? kPass : kFail;
    }
    if (solve->parsed()) {
      const json report = run_solve(read_json_file(config_path), out_dir);
      out << report.dump(2) << '\n';
      return report.at("pass").get<bool>() ? kPass : kFail;
    }
  } catch (const EmptyReport& e) {
    err << "error: " << e.what() << '\n';
    return kEmpty;
  } catch (const DegenerateInput& e) {
    err << "error: " << e.what() << '\n';
    return kEmpty;
  } catch (const SolverError& e) {
    err << "error: " << e.what() << '\n';
    return kFail;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace fastdiff::cli
