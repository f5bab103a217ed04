#include "esterr/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "esterr/errors.hpp"
#include "esterr/parallel.hpp"

namespace esterr {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples, std::uint64_t seed)
    : samples_(std::move(samples)), seed_(seed) {
  require(!samples_.empty(), ErrorKind::InvalidArgument, "empirical distribution needs samples");
  for (double s : samples_) {
    require(std::isfinite(s), ErrorKind::InvalidArgument, "non-finite sample");
  }
  std::sort(samples_.begin(), samples_.end());
}

double EmpiricalDistribution::ecdf(double w) const {
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), w);
  return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
}

double EmpiricalDistribution::mean() const {
  double s = 0.0;
  for (double v : samples_) s += v;
  return s / static_cast<double>(samples_.size());
}

double EmpiricalDistribution::variance() const {
  if (samples_.size() < 2) return 0.0;
  const double m = mean();
  double s = 0.0;
  for (double v : samples_) s += (v - m) * (v - m);
  return s / static_cast<double>(samples_.size() - 1);
}

double EmpiricalDistribution::standard_error() const {
  return std::sqrt(variance() / static_cast<double>(samples_.size()));
}

std::vector<HistogramBin> EmpiricalDistribution::histogram(std::size_t bins, Interval range) const {
  require(bins > 0, ErrorKind::InvalidArgument, "histogram needs at least one bin");
  if (!(range.lo < range.hi)) range = {min(), max()};
  if (!(range.lo < range.hi)) range = {min() - 0.5, max() + 0.5};
  const double width = range.width() / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (double v : samples_) {
    if (v < range.lo || v > range.hi) continue;
    auto k = static_cast<std::size_t>((v - range.lo) / width);
    counts[std::min(k, bins - 1)]++;
  }
  std::vector<HistogramBin> out(bins);
  const double n = static_cast<double>(samples_.size());
  for (std::size_t k = 0; k < bins; ++k) {
    out[k].lo = range.lo + width * static_cast<double>(k);
    out[k].hi = k + 1 == bins ? range.hi : range.lo + width * static_cast<double>(k + 1);
    out[k].density = static_cast<double>(counts[k]) / (n * width);
  }
  return out;
}

EmpiricalDistribution simulate_errors(const PriorSpec& prior, const NoiseSpec& noise, double sigma,
                                      std::size_t n, std::uint64_t seed, unsigned threads,
                                      ErrorScale scale) {
  require(sigma > 0.0 && std::isfinite(sigma), ErrorKind::InvalidSigma, "sigma must be positive");
  require(n >= 1000, ErrorKind::InvalidArgument, "simulate_errors needs n >= 1000");
  std::vector<double> w(n);
  const std::size_t shards = (n + kShardSize - 1) / kShardSize;
  parallel_for(shards, threads, [&](std::size_t k) {
    auto rng = make_stream(seed, k);
    const std::size_t begin = k * kShardSize;
    const std::size_t end = std::min(n, begin + kShardSize);
    for (std::size_t i = begin; i < end; ++i) {
      const double x = draw(prior, rng).x;
      const double z = noise.sample(rng);
      const PosteriorMoments m = posterior_moments(x + sigma * z, prior, noise, sigma, x);
      w[i] = scale == ErrorScale::Normalized ? -m.offset / sigma : -m.offset;
    }
  });
  return EmpiricalDistribution(std::move(w), seed);
}

double CdfTable::operator()(double x) const {
  if (w.empty()) return 0.0;
  if (x <= w.front()) return x < w.front() ? 0.0 : cdf.front();
  if (x >= w.back()) return 1.0;
  const auto it = std::upper_bound(w.begin(), w.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - w.begin());
  const double t = (x - w[j - 1]) / (w[j] - w[j - 1]);
  return std::clamp(cdf[j - 1] + t * (cdf[j] - cdf[j - 1]), 0.0, 1.0);
}

CdfTable analytic_cdf(const ErrorDensity& density, Interval window, std::size_t n_points,
                      unsigned threads) {
  require(window.finite() && window.lo < window.hi, ErrorKind::InvalidArgument,
          "cdf window must be a finite nonempty interval");
  require(n_points >= 3, ErrorKind::InvalidArgument, "cdf table needs at least 3 points");
  std::vector<double> grid;
  grid.reserve(n_points + 16);
  const double mid = 0.5 * (window.lo + window.hi);
  const double half = 0.5 * window.width();
  for (std::size_t i = 0; i < n_points; ++i) {
    grid.push_back(mid - half * std::cos(std::numbers::pi * static_cast<double>(i) /
                                         static_cast<double>(n_points - 1)));
  }
  grid.front() = window.lo;
  grid.back() = window.hi;
  for (double b : density.breakpoints()) {
    if (window.contains_open(b)) grid.push_back(b);
  }
  // Geometric points on both sides of each edge, as deep as the density carries mass.
  // Near an edge f ~ 1/|w|, where trapezoid cells of ratio r overshoot by about ln(r)^2 / 6.
  constexpr int kPerDecade = 128;
  for (double e : density.edges()) {
    for (int j = 0; j <= kPerDecade * density.edge_depth(); ++j) {
      const double d = density.edge_unit() * std::pow(10.0, -static_cast<double>(j) / kPerDecade);
      for (double p : {e - d, e, e + d}) {
        if (window.contains_open(p)) grid.push_back(p);
      }
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<double> f(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) { f[i] = density.query(grid[i]); });

  CdfTable table;
  table.w = grid;
  table.cdf.assign(grid.size(), 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    table.cdf[i] = table.cdf[i - 1] + 0.5 * (f[i] + f[i - 1]) * (grid[i] - grid[i - 1]);
  }
  return table;
}

double ks_distance(const EmpiricalDistribution& emp, const CdfTable& cdf) {
  const auto& s = emp.samples();
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = i;
    while (j < s.size() && s[j] == s[i]) ++j;
    const double f = cdf(s[i]);
    d = std::max({d, std::abs(static_cast<double>(j) / n - f),
                  std::abs(static_cast<double>(i) / n - f)});
    i = j;
  }
  return std::min(d, 1.0);
}

double ks_distance(const EmpiricalDistribution& emp, const ErrorDensity& analytic,
                   std::size_t n_points, unsigned threads) {
  const Interval support = analytic.support_hint();
  const double spread = std::max(emp.max() - emp.min(), 1e-12);
  Interval window = support;
  if (!std::isfinite(window.lo)) window.lo = emp.min() - 0.05 * spread;
  if (!std::isfinite(window.hi)) window.hi = emp.max() + 0.05 * spread;
  return ks_distance(emp, analytic_cdf(analytic, window, n_points, threads));
}

}  // namespace esterr
