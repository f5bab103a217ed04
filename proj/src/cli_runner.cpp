#include "esterr/cli_runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "esterr/convergence.hpp"
#include "esterr/csv.hpp"
#include "esterr/mc_oracle.hpp"
#include "esterr/parallel.hpp"
#include "esterr/scenarios.hpp"

namespace esterr {

using nlohmann::json;

std::string_view to_string(JobKind job) {
  switch (job) {
    case JobKind::Curve: return "curve";
    case JobKind::Density: return "density";
    case JobKind::NormalizedDensity: return "normalized_density";
    case JobKind::Sweep: return "sweep";
    case JobKind::Decomposition: return "decomposition";
    case JobKind::MmseDimension: return "mmse_dimension";
    case JobKind::Oracle: return "oracle";
  }
  return "unknown";
}

json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      fail(where + "." + key, "unknown field");
    }
  }
}

double number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) fail(where + "." + key, "missing required number");
  const json& v = j.at(key);
  if (!v.is_number()) fail(where + "." + key, "expected a number");
  return v.get<double>();
}

double number_or(const json& j, const std::string& key, const std::string& where, double fallback) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

std::uint64_t count(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    fail(where + "." + key, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string text(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) fail(where + "." + key, "missing required string");
  const json& v = j.at(key);
  if (!v.is_string()) fail(where + "." + key, "expected a string");
  return v.get<std::string>();
}

template <class F>
auto wrap(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

NoiseSpec parse_noise(const json& j, const std::string& where, std::string& name) {
  if (j.is_string()) {
    name = j.get<std::string>();
    return wrap(where, [&] { return registry_noise(name); });
  }
  if (!j.is_object()) fail(where, "expected a registry name or an object with a \"name\"");
  name = text(j, "name", where);
  return wrap(where, [&]() -> NoiseSpec {
    if (name == "gaussian") {
      check_keys(j, where, {"name", "mean", "sd"});
      return NoiseSpec::gaussian(number_or(j, "mean", where, 0.0), number_or(j, "sd", where, 1.0));
    }
    if (name == "laplace") {
      check_keys(j, where, {"name", "location", "scale"});
      return NoiseSpec::laplace(number_or(j, "location", where, 0.0),
                                number_or(j, "scale", where, 1.0));
    }
    if (name == "uniform") {
      check_keys(j, where, {"name", "a", "b"});
      return NoiseSpec::uniform(number_or(j, "a", where, -1.0), number_or(j, "b", where, 1.0));
    }
    if (name == "student_t") {
      check_keys(j, where, {"name", "nu"});
      return NoiseSpec::student_t(number(j, "nu", where));
    }
    check_keys(j, where, {"name"});
    return registry_noise(name);
  });
}

GridSpec parse_grid(const json& j, const std::string& where) {
  check_keys(j, where, {"from", "to", "n"});
  GridSpec g;
  g.from = number(j, "from", where);
  g.to = number(j, "to", where);
  if (!j.contains("n")) fail(where + ".n", "missing required count");
  g.n = count(j, "n", where);
  if (!std::isfinite(g.from) || !std::isfinite(g.to)) fail(where, "grid ends must be finite");
  return g;
}

DensityMode parse_mode(const std::string& s, const std::string& where) {
  for (DensityMode m : {DensityMode::GeneralG, DensityMode::Mmse, DensityMode::GaussianSpecialized,
                        DensityMode::ClosedFormBinary, DensityMode::ClosedFormGaussian}) {
    if (s == to_string(m)) return m;
  }
  fail(where, "unknown density mode '" + s + "'");
}

JobKind parse_job(const std::string& s, const std::string& where) {
  for (JobKind k : {JobKind::Curve, JobKind::Density, JobKind::NormalizedDensity, JobKind::Sweep,
                    JobKind::Decomposition, JobKind::MmseDimension, JobKind::Oracle}) {
    if (s == to_string(k)) return k;
  }
  fail(where, "unknown job '" + s + "'");
}

bool is_binary_pm1(const PriorSpec& prior) {
  if (prior.kind() != PriorSpec::Kind::Discrete) return false;
  const auto& a = prior.as_discrete().atoms;
  return a.size() == 2 && a[0].location == -1.0 && a[1].location == 1.0;
}

bool is_gaussian_prior(const PriorSpec& prior) {
  return prior.kind() == PriorSpec::Kind::Continuous &&
         prior.as_continuous().name.rfind("gaussian(", 0) == 0;
}

ScenarioConfig parse_scenario(const json& j, const std::string& where) {
  check_keys(j, where,
             {"name", "job", "prior", "noise", "sigma", "sigmas", "sigma_grid", "grid", "output",
              "seed", "n", "paths", "mode", "estimator", "tolerance"});
  ScenarioConfig sc;
  sc.name = text(j, "name", where);
  if (sc.name.empty()) fail(where + ".name", "must not be empty");
  sc.job = parse_job(text(j, "job", where), where + ".job");
  if (!j.contains("prior")) fail(where + ".prior", "missing required prior");
  sc.prior_json = j.at("prior");
  sc.prior = parse_prior(sc.prior_json, where + ".prior");
  if (!j.contains("noise")) fail(where + ".noise", "missing required noise");
  sc.noise = parse_noise(j.at("noise"), where + ".noise", sc.noise_name);

  if (j.contains("sigma") && j.contains("sigmas")) fail(where, "give either sigma or sigmas");
  if (j.contains("sigma")) sc.sigmas = {number(j, "sigma", where)};
  if (j.contains("sigmas")) {
    const json& s = j.at("sigmas");
    if (!s.is_array() || s.empty()) fail(where + ".sigmas", "expected a non-empty array");
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s[i].is_number()) fail(where + ".sigmas[" + std::to_string(i) + "]", "expected a number");
      sc.sigmas.push_back(s[i].get<double>());
    }
  }
  for (std::size_t i = 0; i < sc.sigmas.size(); ++i) {
    if (!(sc.sigmas[i] > 0.0) || !std::isfinite(sc.sigmas[i])) {
      fail(where + (j.contains("sigma") ? ".sigma" : ".sigmas[" + std::to_string(i) + "]"),
           "sigma must be a positive finite number");
    }
  }
  if (j.contains("sigma_grid")) {
    sc.sigma_grid = parse_grid(j.at("sigma_grid"), where + ".sigma_grid");
    const GridSpec& g = *sc.sigma_grid;
    if (!(g.from > g.to && g.to > 0.0) || g.n < 2) {
      fail(where + ".sigma_grid", "needs from > to > 0 and n >= 2");
    }
  }
  if (j.contains("grid")) {
    sc.grid = parse_grid(j.at("grid"), where + ".grid");
    if (!(sc.grid->from < sc.grid->to) || sc.grid->n < 2) {
      fail(where + ".grid", "needs from < to and n >= 2");
    }
  }
  sc.output = j.contains("output") ? text(j, "output", where) : sc.name;
  if (sc.output.empty() || sc.output.find("..") != std::string::npos || sc.output.front() == '/') {
    fail(where + ".output", "must be a relative path stem");
  }
  if (j.contains("seed")) sc.seed = count(j, "seed", where);
  if (j.contains("n")) sc.n = count(j, "n", where);
  if (j.contains("paths")) sc.paths = count(j, "paths", where);
  if (j.contains("mode")) sc.mode = parse_mode(text(j, "mode", where), where + ".mode");
  if (j.contains("estimator")) {
    const std::string w = where + ".estimator";
    check_keys(j.at("estimator"), w, {"slope", "intercept"});
    sc.estimator = LinearEstimatorSpec{number(j.at("estimator"), "slope", w),
                                       number_or(j.at("estimator"), "intercept", w, 0.0)};
  }
  if (j.contains("tolerance")) {
    sc.tolerance = number(j, "tolerance", where);
    if (!(*sc.tolerance >= 0.0)) fail(where + ".tolerance", "must be non-negative");
  }

  // Job-specific validation.
  const bool needs_sigma = sc.job != JobKind::Sweep && sc.job != JobKind::Decomposition;
  if (needs_sigma && sc.sigmas.empty()) fail(where, "job requires sigma or sigmas");
  if (!needs_sigma && !sc.sigmas.empty()) fail(where, "sweep-type jobs take sigma_grid, not sigma");
  if (sc.job == JobKind::Decomposition && sc.prior.kind() != PriorSpec::Kind::Mixture) {
    fail(where + ".prior", "decomposition requires a mixture prior");
  }
  if ((sc.job == JobKind::Sweep || sc.job == JobKind::Decomposition) && sc.paths == 0) {
    fail(where + ".paths", "must be positive");
  }
  if ((sc.job == JobKind::Oracle || sc.job == JobKind::MmseDimension) && sc.n < 1000) {
    fail(where + ".n", "Monte-Carlo jobs need n >= 1000");
  }
  const bool density_like = sc.job == JobKind::Density || sc.job == JobKind::NormalizedDensity ||
                            sc.job == JobKind::Oracle;
  if (j.contains("mode") && !density_like) fail(where + ".mode", "only density jobs take a mode");
  if (density_like && !(sc.prior.hull().width() > 0.0)) {
    fail(where + ".prior", "a point-mass prior has no error density");
  }
  if (density_like) {
    switch (sc.mode) {
      case DensityMode::GeneralG:
        if (!sc.estimator) fail(where + ".estimator", "general_g mode needs a linear estimator");
        break;
      case DensityMode::GaussianSpecialized:
        if (!sc.noise.is_gaussian()) fail(where + ".mode", "gaussian_specialized needs Gaussian noise");
        break;
      case DensityMode::ClosedFormBinary:
        if (!is_binary_pm1(sc.prior) || !sc.noise.is_gaussian() || sc.noise.parameters()[0] != 0.0 ||
            sc.noise.parameters()[1] != 1.0) {
          fail(where + ".mode", "closed_form_binary needs a +/-1 prior and standard Gaussian noise");
        }
        break;
      case DensityMode::ClosedFormGaussian:
        if (!is_gaussian_prior(sc.prior) || !sc.noise.is_gaussian()) {
          fail(where + ".mode", "closed_form_gaussian needs a Gaussian prior and Gaussian noise");
        }
        break;
      case DensityMode::Mmse: break;
    }
  }
  if (sc.estimator && sc.mode != DensityMode::GeneralG) {
    fail(where + ".estimator", "only general_g mode takes an estimator");
  }
  if (sc.job == JobKind::MmseDimension && !std::isfinite(sc.noise.variance())) {
    fail(where + ".noise", "mmse_dimension needs noise with finite variance");
  }
  return sc;
}

}  // namespace

PriorSpec parse_prior(const json& j, const std::string& where) {
  if (j.is_string()) {
    return wrap(where, [&] { return registry_prior(j.get<std::string>()); });
  }
  if (!j.is_object()) fail(where, "expected a registry name or an object");
  if (j.contains("registry")) {
    check_keys(j, where, {"registry"});
    return wrap(where, [&] { return registry_prior(text(j, "registry", where)); });
  }
  const std::string type = text(j, "type", where);
  return wrap(where, [&]() -> PriorSpec {
    if (type == "binary") {
      check_keys(j, where, {"type", "p"});
      return PriorSpec::binary(number(j, "p", where));
    }
    if (type == "point_mass") {
      check_keys(j, where, {"type", "location"});
      return PriorSpec::point_mass(number(j, "location", where));
    }
    if (type == "discrete") {
      check_keys(j, where, {"type", "atoms"});
      if (!j.contains("atoms") || !j.at("atoms").is_array()) {
        fail(where + ".atoms", "expected an array of [location, mass] pairs");
      }
      std::vector<Atom> atoms;
      const json& a = j.at("atoms");
      for (std::size_t i = 0; i < a.size(); ++i) {
        const std::string w = where + ".atoms[" + std::to_string(i) + "]";
        if (!a[i].is_array() || a[i].size() != 2 || !a[i][0].is_number() || !a[i][1].is_number()) {
          fail(w, "expected [location, mass]");
        }
        atoms.push_back({a[i][0].get<double>(), a[i][1].get<double>()});
      }
      return PriorSpec::discrete(std::move(atoms));
    }
    if (type == "gaussian") {
      check_keys(j, where, {"type", "mean", "sd"});
      return PriorSpec::gaussian(number_or(j, "mean", where, 0.0), number_or(j, "sd", where, 1.0));
    }
    if (type == "uniform") {
      check_keys(j, where, {"type", "a", "b"});
      return PriorSpec::uniform(number(j, "a", where), number(j, "b", where));
    }
    if (type == "beta") {
      check_keys(j, where, {"type", "a", "b", "lo", "hi"});
      return PriorSpec::beta(number(j, "a", where), number(j, "b", where),
                             number_or(j, "lo", where, 0.0), number_or(j, "hi", where, 1.0));
    }
    if (type == "mixture") {
      check_keys(j, where, {"type", "alpha", "first", "second"});
      if (!j.contains("first") || !j.contains("second")) {
        fail(where, "mixture needs first and second components");
      }
      return PriorSpec::mixture(parse_prior(j.at("first"), where + ".first"),
                                parse_prior(j.at("second"), where + ".second"),
                                number(j, "alpha", where));
    }
    fail(where + ".type", "unknown prior type '" + type + "'");
  });
}

ExperimentConfig parse_config(const json& doc) {
  check_keys(doc, "config", {"version", "scenarios"});
  if (!doc.contains("version")) fail("config.version", "missing schema version");
  if (!doc.at("version").is_number_integer() || doc.at("version").get<int>() != 1) {
    fail("config.version", "unsupported schema version (expected 1)");
  }
  if (!doc.contains("scenarios") || !doc.at("scenarios").is_array()) {
    fail("config.scenarios", "expected an array");
  }
  ExperimentConfig cfg;
  std::set<std::string> names, stems;
  const json& list = doc.at("scenarios");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = "scenarios[" + std::to_string(i) + "]";
    ScenarioConfig sc = parse_scenario(list[i], where);
    if (!names.insert(sc.name).second) fail(where + ".name", "duplicate scenario name");
    if (!stems.insert(sc.output).second) fail(where + ".output", "duplicate output stem");
    cfg.scenarios.push_back(std::move(sc));
  }
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

// ---------------------------------------------------------------------------
// Jobs

namespace {

std::vector<double> linspace(const GridSpec& g) {
  std::vector<double> out(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    out[i] = g.n == 1 ? g.from
                      : g.from + (g.to - g.from) * static_cast<double>(i) /
                                     static_cast<double>(g.n - 1);
  }
  if (g.n > 1) out.back() = g.to;
  return out;
}

std::vector<double> sigma_grid_of(const ScenarioConfig& sc) {
  if (sc.sigma_grid) return geometric_sigma_grid(sc.sigma_grid->from, sc.sigma_grid->to, sc.sigma_grid->n);
  return geometric_sigma_grid();
}

std::string artifact_name(const ScenarioConfig& sc, std::size_t sigma_index) {
  if (sc.sigmas.size() <= 1) return sc.output + ".csv";
  return sc.output + "_sigma" + format_double(sc.sigmas[sigma_index]) + ".csv";
}

struct JobContext {
  const ScenarioConfig& sc;
  std::filesystem::path out_dir;
  unsigned threads;
  ScenarioResult& result;

  void write(const CsvTable& table, const std::string& name) {
    table.write(out_dir / name);
    result.artifacts.push_back(name);
  }
};

void curve_job(JobContext& ctx) {
  const ScenarioConfig& sc = ctx.sc;
  json per_sigma = json::array();
  bool ok = true;
  for (std::size_t k = 0; k < sc.sigmas.size(); ++k) {
    const double sigma = sc.sigmas[k];
    const Interval range = sc.grid ? Interval{sc.grid->from, sc.grid->to}
                                   : default_y_range(sc.prior, sc.noise, sigma);
    const std::size_t n = sc.grid ? std::max<std::size_t>(sc.grid->n, 64) : 257;
    const PosteriorCurve curve(sc.prior, sc.noise, sigma, range, n);
    CsvTable table({"y", "mean", "variance"});
    for (const CurvePoint& p : curve.grid()) table.add_row({p.y, p.mean, p.variance});
    ctx.write(table, artifact_name(sc, k));
    json m;
    m["sigma"] = sigma;
    switch (curve.certificate()) {
      case Monotonicity::Strict: m["certificate"] = "strict"; break;
      case Monotonicity::Nondecreasing: m["certificate"] = "nondecreasing"; break;
      case Monotonicity::Failed: m["certificate"] = "failed"; break;
    }
    if (curve.witness()) m["witness"] = {curve.witness()->lo, curve.witness()->hi};
    const Interval r = range_of(curve);
    m["range"] = json::array({json_number(r.lo), json_number(r.hi)});
    if (curve.certificate() == Monotonicity::Failed) ok = false;
    per_sigma.push_back(m);
  }
  ctx.result.metrics["curves"] = per_sigma;
  ctx.result.status = ok ? "pass" : "fail";
  if (!ok) ctx.result.message = "posterior-mean curve failed its monotonicity certificate";
}

ErrorDensity build_density(const ScenarioConfig& sc, double sigma, ErrorScale scale) {
  switch (sc.mode) {
    case DensityMode::Mmse:
    case DensityMode::GaussianSpecialized: {
      const InverseMap map(build_curve(sc.prior, sc.noise, sigma));
      return make_mmse_density(map, sc.mode, scale);
    }
    case DensityMode::GeneralG:
      return make_general_density(linear_estimator(sc.estimator->slope, sc.estimator->intercept),
                                  sc.prior, sc.noise, sigma, scale);
    case DensityMode::ClosedFormBinary:
      return make_binary_density(sc.prior.as_discrete().atoms[1].mass, sigma, scale);
    case DensityMode::ClosedFormGaussian:
      return make_gaussian_density(sc.prior.as_continuous().variance, sc.noise.variance(), sigma,
                                   scale);
  }
  throw Error(ErrorKind::UnsupportedMode, "unknown density mode");
}

std::vector<double> density_grid(const ScenarioConfig& sc, const ErrorDensity& d, double sigma) {
  if (sc.grid) return linspace(*sc.grid);
  Interval s = d.support_hint();
  const double reach = 10.0 * sc.noise.scale() * (d.scale() == ErrorScale::Raw ? sigma : 1.0);
  if (!std::isfinite(s.lo)) s.lo = -reach;
  if (!std::isfinite(s.hi)) s.hi = reach;
  return linspace({s.lo, s.hi, 801});
}

void density_job(JobContext& ctx, ErrorScale scale) {
  const ScenarioConfig& sc = ctx.sc;
  const double tol = sc.tolerance.value_or(1e-4);
  json per_sigma = json::array();
  bool ok = true;
  for (std::size_t k = 0; k < sc.sigmas.size(); ++k) {
    const double sigma = sc.sigmas[k];
    const ErrorDensity d = build_density(sc, sigma, scale);
    const auto grid = density_grid(sc, d, sigma);
    const auto rows = emit_density_curve(d, grid, ctx.threads);
    CsvTable table({"w", scale == ErrorScale::Raw ? "f_W" : "f_E_sigma"});
    for (const auto& r : rows) table.add_row({r.w, r.f});
    ctx.write(table, artifact_name(sc, k));
    json m;
    m["sigma"] = sigma;
    m["mode"] = std::string(to_string(d.mode()));
    m["normalization"] = d.normalization();
    m["support"] = json::array({json_number(d.support_hint().lo), json_number(d.support_hint().hi)});
    if (std::abs(d.normalization() - 1.0) > tol) ok = false;
    per_sigma.push_back(m);
  }
  ctx.result.metrics["tolerance"] = tol;
  ctx.result.metrics["densities"] = per_sigma;
  ctx.result.status = ok ? "pass" : "fail";
  if (!ok) ctx.result.message = "density normalization outside tolerance";
}

void sweep_job(JobContext& ctx) {
  const ScenarioConfig& sc = ctx.sc;
  const auto grid = sigma_grid_of(sc);
  const auto seeds = path_seeds(sc.paths, sc.seed);
  std::vector<SweepReport> reports(seeds.size());
  std::vector<std::string> no_prediction(seeds.size());
  parallel_for(seeds.size(), ctx.threads, [&](std::size_t i) {
    const RealizationPath path = draw_path(sc.prior, sc.noise, seeds[i]);
    try {
      reports[i] = pathwise_sweep(path, sc.prior, sc.noise, grid);
    } catch (const NoPredictionError& e) {
      reports[i] = e.report();
      no_prediction[i] = e.what();
    }
  });
  CsvTable table({"seed", "sigma", "e_value", "predicted_limit", "deviation"});
  std::size_t failures = 0, monotone_paths = 0;
  double worst = 0.0;
  std::uint64_t worst_seed = seeds.front();
  for (const auto& r : reports) {
    const auto d = r.deviations();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      table.add_row({r.path.seed, grid[i], r.e_values[i], r.predicted_limit, d[i]});
      if (!r.failures[i].empty()) ++failures;
    }
    if (r.tail_nonincreasing()) ++monotone_paths;
    if (!(r.terminal_deviation <= worst)) {
      worst = r.terminal_deviation;
      worst_seed = r.path.seed;
    }
  }
  ctx.write(table, sc.output + ".csv");
  const LimitRow row = classify_limit_row(sc.prior, sc.noise);
  const auto profile = max_deviation_profile(reports);
  const bool row_monotone = nonincreasing_tail(grid, profile);
  json& m = ctx.result.metrics;
  m["row"] = std::string(to_string(row));
  m["paths"] = seeds.size();
  m["sigma_final"] = grid.back();
  m["failed_evaluations"] = failures;
  if (!no_prediction.front().empty()) {
    ctx.result.status = "error";
    ctx.result.message = no_prediction.front();
    return;
  }
  m["max_terminal_deviation"] = json_number(worst);
  m["worst_seed"] = worst_seed;
  m["paths_tail_nonincreasing"] = monotone_paths;
  m["max_deviation_tail_nonincreasing"] = row_monotone;
  bool ok = failures == 0 && row_monotone;
  if (sc.tolerance) {
    m["tolerance"] = *sc.tolerance;
    ok = ok && worst <= *sc.tolerance;
  }
  ctx.result.status = ok ? "pass" : "fail";
  if (!ok) ctx.result.message = "terminal deviation or tail monotonicity check failed";
}

void decomposition_job(JobContext& ctx) {
  const ScenarioConfig& sc = ctx.sc;
  const auto grid = sigma_grid_of(sc);
  const auto seeds = path_seeds(sc.paths, sc.seed);
  std::vector<DecompositionReport> reports(seeds.size());
  parallel_for(seeds.size(), ctx.threads, [&](std::size_t i) {
    reports[i] = decomposition_check(draw_path(sc.prior, sc.noise, seeds[i]), sc.prior, sc.noise, grid);
  });
  CsvTable table({"seed", "u", "sigma", "e_value", "component_e_value", "deviation"});
  std::size_t failures = 0, monotone = 0;
  double worst = 0.0;
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      table.add_row({r.path.seed, static_cast<std::int64_t>(*r.path.u), grid[i], r.e_values[i],
                     r.component_e_values[i], r.deviations[i]});
      if (!r.failures[i].empty()) ++failures;
    }
    if (r.tail_nonincreasing()) ++monotone;
    if (!(r.final_deviation <= worst)) worst = r.final_deviation;
  }
  ctx.write(table, sc.output + ".csv");
  const double tol = sc.tolerance.value_or(1e-3);
  json& m = ctx.result.metrics;
  m["paths"] = seeds.size();
  m["sigma_final"] = grid.back();
  m["failed_evaluations"] = failures;
  m["max_final_deviation"] = json_number(worst);
  m["paths_tail_nonincreasing"] = monotone;
  m["tolerance"] = tol;
  const bool ok = failures == 0 && worst <= tol && monotone == seeds.size();
  ctx.result.status = ok ? "pass" : "fail";
  if (!ok) ctx.result.message = "decomposition deviation above tolerance or not decreasing";
}

void mmse_job(JobContext& ctx) {
  const ScenarioConfig& sc = ctx.sc;
  const double rel = sc.tolerance.value_or(0.05);
  constexpr double kAbsFloor = 1e-3;
  CsvTable table({"sigma", "method", "value", "error"});
  json per_sigma = json::array();
  bool ok = true;
  const double limit = mmse_dimension_limit(sc.prior, sc.noise);
  for (double sigma : sc.sigmas) {
    const auto q = mmse_dimension_estimate(sc.prior, sc.noise, sigma, MmseMethod::Quadrature);
    const auto mc = mmse_dimension_estimate(sc.prior, sc.noise, sigma, MmseMethod::MonteCarlo, sc.n,
                                            sc.seed, ctx.threads);
    table.add_row({sigma, std::string("quadrature"), q.value, q.error});
    table.add_row({sigma, std::string("monte_carlo"), mc.value, mc.error});
    const bool near_limit = std::abs(q.value - limit) <= rel * limit + kAbsFloor;
    const bool agree = std::abs(q.value - mc.value) <= 3.0 * mc.error + 1e-12;
    json m;
    m["sigma"] = sigma;
    m["quadrature"] = q.value;
    m["monte_carlo"] = mc.value;
    m["monte_carlo_se"] = mc.error;
    m["within_limit_tolerance"] = near_limit;
    m["methods_agree"] = agree;
    ok = ok && near_limit && agree;
    per_sigma.push_back(m);
  }
  ctx.write(table, sc.output + ".csv");
  ctx.result.metrics["limit"] = limit;
  ctx.result.metrics["relative_tolerance"] = rel;
  ctx.result.metrics["n"] = sc.n;
  ctx.result.metrics["seed"] = sc.seed;
  ctx.result.metrics["estimates"] = per_sigma;
  ctx.result.status = ok ? "pass" : "fail";
  if (!ok) ctx.result.message = "estimate away from the limit or methods disagree";
}

void oracle_job(JobContext& ctx) {
  const ScenarioConfig& sc = ctx.sc;
  const double tol = sc.tolerance.value_or(0.005);
  json per_sigma = json::array();
  bool ok = true;
  for (std::size_t k = 0; k < sc.sigmas.size(); ++k) {
    const double sigma = sc.sigmas[k];
    const auto emp = simulate_errors(sc.prior, sc.noise, sigma, sc.n, sc.seed, ctx.threads);
    const ErrorDensity d = build_density(sc, sigma, ErrorScale::Raw);
    const double ks = ks_distance(emp, d, 4096, ctx.threads);
    const Interval s = d.support_hint();
    const Interval range{std::max(emp.min(), s.lo), std::min(emp.max(), s.hi)};
    const auto bins = emp.histogram(200, range);
    std::vector<double> mids(bins.size());
    for (std::size_t i = 0; i < bins.size(); ++i) mids[i] = 0.5 * (bins[i].lo + bins[i].hi);
    const auto analytic = emit_density_curve(d, mids, ctx.threads);
    CsvTable table({"w_lo", "w_hi", "empirical_density", "analytic_density"});
    for (std::size_t i = 0; i < bins.size(); ++i) {
      table.add_row({bins[i].lo, bins[i].hi, bins[i].density, analytic[i].f});
    }
    ctx.write(table, artifact_name(sc, k));
    json m;
    m["sigma"] = sigma;
    m["ks"] = ks;
    m["sample_mean"] = emp.mean();
    m["sample_se"] = emp.standard_error();
    m["normalization"] = d.normalization();
    ok = ok && ks < tol;
    per_sigma.push_back(m);
  }
  ctx.result.metrics["n"] = sc.n;
  ctx.result.metrics["seed"] = sc.seed;
  ctx.result.metrics["tolerance"] = tol;
  ctx.result.metrics["oracle"] = per_sigma;
  ctx.result.status = ok ? "pass" : "fail";
  if (!ok) ctx.result.message = "KS distance above tolerance";
}

ScenarioResult run_scenario(const ScenarioConfig& sc, const std::filesystem::path& out_dir,
                            unsigned threads) {
  ScenarioResult result;
  result.name = sc.name;
  result.job = std::string(to_string(sc.job));
  JobContext ctx{sc, out_dir, threads, result};
  try {
    switch (sc.job) {
      case JobKind::Curve: curve_job(ctx); break;
      case JobKind::Density: density_job(ctx, ErrorScale::Raw); break;
      case JobKind::NormalizedDensity: density_job(ctx, ErrorScale::Normalized); break;
      case JobKind::Sweep: sweep_job(ctx); break;
      case JobKind::Decomposition: decomposition_job(ctx); break;
      case JobKind::MmseDimension: mmse_job(ctx); break;
      case JobKind::Oracle: oracle_job(ctx); break;
    }
  } catch (const std::exception& e) {
    result.status = "error";
    result.message = e.what();
  }
  return result;
}

}  // namespace

RunResult run(const ExperimentConfig& config, const RunOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  if (ec || !std::filesystem::is_directory(options.out_dir)) {
    throw Error(ErrorKind::Io, "cannot create output directory " + options.out_dir.string());
  }
  std::vector<ScenarioConfig> scenarios = config.scenarios;
  if (options.seed_override) {
    for (auto& sc : scenarios) sc.seed = *options.seed_override;
  }
  const unsigned threads = resolve_threads(options.threads);
  const std::size_t n = scenarios.size();
  const unsigned outer = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  const unsigned inner = std::max(1u, threads / outer);

  RunResult out;
  out.scenarios.resize(n);
  parallel_for(n, outer, [&](std::size_t i) {
    out.scenarios[i] = run_scenario(scenarios[i], options.out_dir, inner);
  });

  json list = json::array();
  bool all_pass = true;
  for (const auto& r : out.scenarios) {
    json e;
    e["name"] = r.name;
    e["job"] = r.job;
    e["status"] = r.status;
    if (!r.message.empty()) e["message"] = r.message;
    e["metrics"] = r.metrics;
    e["artifacts"] = r.artifacts;
    list.push_back(e);
    all_pass = all_pass && r.status == "pass";
  }
  out.summary["version"] = 1;
  out.summary["status"] = all_pass ? "pass" : "fail";
  out.summary["scenarios"] = list;
  write_text_file(options.out_dir / "summary.json", out.summary.dump(2) + "\n");
  out.exit_code = all_pass ? 0 : 1;
  return out;
}

int run_config_file(const std::filesystem::path& config_path, const RunOptions& options,
                    std::ostream& log) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const Error& e) {
    log << e.what() << "\n";
    return 2;
  }
  RunResult r;
  try {
    r = run(cfg, options);
  } catch (const Error& e) {
    log << e.what() << "\n";
    return 2;
  }
  for (const auto& s : r.scenarios) {
    log << s.name << " [" << s.job << "] " << s.status;
    if (!s.message.empty()) log << ": " << s.message;
    log << "\n";
  }
  return r.exit_code;
}

json selftest_config() {
  json sweep_grid = {{"from", 1.0}, {"to", 1e-3}, {"n", 40}};
  json scenarios = json::array({
      {{"name", "binary_normalized"},
       {"job", "normalized_density"},
       {"prior", "binary_sym"},
       {"noise", "gaussian"},
       {"sigmas", {0.3, 0.5, 1.0}},
       {"grid", {{"from", -7.0}, {"to", 7.0}, {"n", 1401}}}},
      {{"name", "gauss_gauss_density"},
       {"job", "density"},
       {"prior", "gaussian"},
       {"noise", "gaussian"},
       {"sigma", 1.0},
       {"grid", {{"from", -4.0}, {"to", 4.0}, {"n", 161}}}},
      {{"name", "binary_closed_form"},
       {"job", "normalized_density"},
       {"prior", "binary_p03"},
       {"noise", "gaussian"},
       {"mode", "closed_form_binary"},
       {"sigma", 0.5}},
      {{"name", "binary_curve"},
       {"job", "curve"},
       {"prior", "binary_sym"},
       {"noise", "gaussian"},
       {"sigmas", {0.25, 1.0}}},
      {{"name", "limit_discrete"},
       {"job", "sweep"},
       {"prior", "binary_sym"},
       {"noise", "gaussian"},
       {"sigma_grid", sweep_grid}},
      {{"name", "limit_bounded_continuous"},
       {"job", "sweep"},
       {"prior", "beta22"},
       {"noise", "laplace"},
       {"sigma_grid", sweep_grid}},
      {{"name", "limit_power_tail"},
       {"job", "sweep"},
       {"prior", "uniform01"},
       {"noise", "student_t3"},
       {"sigma_grid", sweep_grid}},
      {{"name", "limit_mixture"},
       {"job", "sweep"},
       {"prior", "mix_atom_uniform"},
       {"noise", "gaussian"},
       {"sigma_grid", sweep_grid}},
      {{"name", "decomposition_separated"},
       {"job", "decomposition"},
       {"prior",
        {{"type", "mixture"},
         {"alpha", 0.5},
         {"first", {{"type", "discrete"}, {"atoms", {{-1.0, 0.5}, {1.0, 0.5}}}}},
         {"second", {{"type", "uniform"}, {"a", 5.0}, {"b", 6.0}}}}},
       {"noise", "gaussian"},
       {"sigma_grid", sweep_grid}},
      {{"name", "mmse_mixture"},
       {"job", "mmse_dimension"},
       {"prior", "mix_atom_uniform"},
       {"noise", "gaussian"},
       {"sigma", 1e-2},
       {"n", 100000}},
      {{"name", "oracle_binary"},
       {"job", "oracle"},
       {"prior", "binary_sym"},
       {"noise", "gaussian"},
       {"sigma", 0.5},
       {"n", 1000000}},
  });
  return {{"version", 1}, {"scenarios", scenarios}};
}

}  // namespace esterr
