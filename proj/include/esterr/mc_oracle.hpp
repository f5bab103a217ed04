#pragma once

// Seeded Monte-Carlo samples of the estimation error and their comparison
// with analytic error densities.

#include <cstdint>
#include <vector>

#include "esterr/error_density.hpp"

namespace esterr {

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  double density = 0.0;
};

class EmpiricalDistribution {
 public:
  /// Sorts the samples.
  EmpiricalDistribution(std::vector<double> samples, std::uint64_t seed);

  const std::vector<double>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  std::uint64_t seed() const { return seed_; }

  /// Fraction of samples <= w.
  double ecdf(double w) const;
  double mean() const;
  /// Unbiased sample variance.
  double variance() const;
  double standard_error() const;
  double min() const { return samples_.front(); }
  double max() const { return samples_.back(); }

  /// Equal-width bins over `range` (sample range when empty); densities use the full count.
  std::vector<HistogramBin> histogram(std::size_t bins, Interval range = {0.0, 0.0}) const;

 private:
  std::vector<double> samples_;
  std::uint64_t seed_;
};

/// Samples per counter-based stream; shard k uses make_stream(seed, k).
inline constexpr std::size_t kShardSize = 4096;

/// n draws of W = X - E[X | X + sigma Z] (or W / sigma for the normalized scale).
/// Bit-identical for a given seed regardless of `threads`.
EmpiricalDistribution simulate_errors(const PriorSpec& prior, const NoiseSpec& noise, double sigma,
                                      std::size_t n, std::uint64_t seed, unsigned threads = 1,
                                      ErrorScale scale = ErrorScale::Raw);

struct CdfTable {
  std::vector<double> w;
  std::vector<double> cdf;

  /// Linear interpolation, clamped to [0, 1] outside the table.
  double operator()(double x) const;
};

/// Cumulative trapezoid of the density on a cosine grid over `window`
/// (densest at the ends), merged with the density's breakpoints and a
/// geometric refinement towards its edges.
CdfTable analytic_cdf(const ErrorDensity& density, Interval window, std::size_t n_points = 4096,
                      unsigned threads = 1);

/// sup over sample points of |ecdf - F|, F the running quadrature of the density.
/// Infinite support ends are truncated just beyond the sample range.
double ks_distance(const EmpiricalDistribution& emp, const ErrorDensity& analytic,
                   std::size_t n_points = 4096, unsigned threads = 1);
/// Same statistic against a precomputed CDF table.
double ks_distance(const EmpiricalDistribution& emp, const CdfTable& cdf);

}  // namespace esterr
