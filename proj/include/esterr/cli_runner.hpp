#pragma once

// Declarative experiment runner: a versioned JSON document lists scenarios,
// each scenario runs one job and writes CSV artifacts, and the run writes a
// summary.json with one entry per scenario.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "esterr/error_density.hpp"
#include "esterr/errors.hpp"

namespace esterr {

enum class JobKind { Curve, Density, NormalizedDensity, Sweep, Decomposition, MmseDimension, Oracle };

std::string_view to_string(JobKind job);

struct GridSpec {
  double from = 0.0;
  double to = 0.0;
  std::size_t n = 0;
};

struct LinearEstimatorSpec {
  double slope = 1.0;
  double intercept = 0.0;
};

struct ScenarioConfig {
  std::string name;
  JobKind job = JobKind::Curve;
  nlohmann::json prior_json;
  PriorSpec prior = PriorSpec::point_mass(0.0);
  std::string noise_name;
  NoiseSpec noise = NoiseSpec::gaussian();
  std::vector<double> sigmas;
  std::optional<GridSpec> sigma_grid;
  std::optional<GridSpec> grid;
  std::string output;
  std::uint64_t seed = 1;
  std::size_t n = 1000000;
  std::size_t paths = 256;
  DensityMode mode = DensityMode::Mmse;
  std::optional<LinearEstimatorSpec> estimator;
  std::optional<double> tolerance;
};

struct ExperimentConfig {
  std::vector<ScenarioConfig> scenarios;
};

/// Thrown for malformed or invalid config documents; the message names the
/// offending field ("scenarios[2].sigma: ...") or the parse position.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::ConfigParse, what) {}
};

PriorSpec parse_prior(const nlohmann::json& j, const std::string& where);
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunOptions {
  std::filesystem::path out_dir = ".";
  /// 0 means all hardware threads. Artifacts do not depend on this value.
  unsigned threads = 0;
  std::optional<std::uint64_t> seed_override;
};

struct ScenarioResult {
  std::string name;
  std::string job;
  /// "pass", "fail" or "error".
  std::string status;
  std::string message;
  nlohmann::json metrics = nlohmann::json::object();
  std::vector<std::string> artifacts;
};

struct RunResult {
  std::vector<ScenarioResult> scenarios;
  nlohmann::json summary;
  /// 0 when every scenario passed, 1 otherwise.
  int exit_code = 0;
};

/// Runs every scenario (errors are collected per scenario) and writes the
/// artifacts plus summary.json into options.out_dir. Throws Error(Io) when the
/// output directory cannot be written.
RunResult run(const ExperimentConfig& config, const RunOptions& options);

/// Exit-code wrapper: 0 pass, 1 scenario failure or error, 2 config or IO error.
int run_config_file(const std::filesystem::path& config_path, const RunOptions& options,
                    std::ostream& log);

/// Config exercised by `selftest` and by the determinism check.
nlohmann::json selftest_config();

/// JSON value for a double; non-finite values become the strings "inf", "-inf", "nan".
nlohmann::json json_number(double v);

}  // namespace esterr
