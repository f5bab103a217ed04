#include "esterr/scenarios.hpp"

namespace esterr {

PriorSpec registry_prior(const std::string& name) {
  for (auto& p : prior_registry()) {
    if (p.name == name) return p.prior;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown registry prior '" + name + "'");
}

NoiseSpec registry_noise(const std::string& name) {
  for (auto& n : noise_registry()) {
    if (n.name == name) return n.noise;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown registry noise '" + name + "'");
}

std::vector<DensityScenario> density_scenarios() {
  auto make = [](std::string name, std::string prior, std::string noise, double sigma) {
    return DensityScenario{std::move(name), prior, noise, registry_prior(prior),
                           registry_noise(noise), sigma};
  };
  return {
      make("gauss_gauss", "gaussian", "gaussian", 1.0),
      make("binary_sym", "binary_sym", "gaussian", 0.5),
      make("binary_p03", "binary_p03", "gaussian", 0.5),
      make("three_atom", "three_atom", "gaussian", 0.5),
      make("uniform_gauss", "uniform01", "gaussian", 0.3),
      make("gauss_uniform", "gaussian", "uniform", 0.5),
      make("mix_atom_uniform", "mix_atom_uniform", "gaussian", 0.5),
  };
}

std::vector<LimitScenario> limit_scenarios() {
  return {
      {"discrete", registry_prior("binary_sym"), registry_noise("gaussian"), LimitRow::Discrete},
      {"bounded_continuous", registry_prior("beta22"), registry_noise("laplace"),
       LimitRow::BoundedContinuous},
      {"power_tail_continuous", registry_prior("uniform01"), registry_noise("student_t3"),
       LimitRow::PowerTailContinuous},
      {"mixture", registry_prior("mix_atom_uniform"), registry_noise("gaussian"),
       LimitRow::Mixture},
  };
}

std::vector<DecompositionScenario> decomposition_scenarios() {
  return {
      {"atoms_pm1_uniform56",
       PriorSpec::mixture(PriorSpec::discrete({{-1.0, 0.5}, {1.0, 0.5}}), PriorSpec::uniform(5.0, 6.0),
                          0.5),
       NoiseSpec::gaussian(), true},
      {"mix_atom_uniform", registry_prior("mix_atom_uniform"), NoiseSpec::gaussian(), true},
      {"mix_nested_uniform", registry_prior("mix_nested_uniform"), NoiseSpec::gaussian(), false},
  };
}

std::vector<MmseScenario> mmse_scenarios() {
  return {
      {"binary_sym", registry_prior("binary_sym"), NoiseSpec::gaussian(), 1e-2},
      {"mix_atom_uniform", registry_prior("mix_atom_uniform"), NoiseSpec::gaussian(), 1e-2},
      {"gauss_gauss", registry_prior("gaussian"), NoiseSpec::gaussian(), 1e-2},
  };
}

std::vector<std::uint64_t> path_seeds(std::size_t n, std::uint64_t base) {
  std::vector<std::uint64_t> seeds(n);
  for (std::size_t i = 0; i < n; ++i) seeds[i] = base + i;
  return seeds;
}

}  // namespace esterr
