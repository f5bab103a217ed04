#pragma once

// Named (prior, noise, sigma) combinations shared by the runner, the
// calibration command and the acceptance suite.

#include <string>
#include <vector>

#include "esterr/convergence.hpp"

namespace esterr {

/// Registry lookups; unknown names throw Error(InvalidArgument).
PriorSpec registry_prior(const std::string& name);
NoiseSpec registry_noise(const std::string& name);

struct DensityScenario {
  std::string name;
  std::string prior_name;
  std::string noise_name;
  PriorSpec prior;
  NoiseSpec noise;
  double sigma = 1.0;
};

/// Scenarios whose error density is checked against Monte Carlo.
std::vector<DensityScenario> density_scenarios();

struct LimitScenario {
  std::string name;
  PriorSpec prior;
  NoiseSpec noise;
  LimitRow row = LimitRow::None;
};

/// One instance of each small-noise limit row.
std::vector<LimitScenario> limit_scenarios();

struct DecompositionScenario {
  std::string name;
  PriorSpec mixture;
  NoiseSpec noise;
  /// Mutually singular components with disjoint supports.
  bool separated = true;
};

std::vector<DecompositionScenario> decomposition_scenarios();

struct MmseScenario {
  std::string name;
  PriorSpec prior;
  NoiseSpec noise;
  double sigma = 1e-2;
};

std::vector<MmseScenario> mmse_scenarios();

/// Seeds of the paths used for the almost-sure checks.
std::vector<std::uint64_t> path_seeds(std::size_t n = 256, std::uint64_t base = 1);

}  // namespace esterr
