#include "esterr/convergence.hpp"

#include <algorithm>
#include <cmath>

#include "esterr/mc_oracle.hpp"
#include "esterr/quadrature.hpp"

namespace esterr {

std::vector<double> geometric_sigma_grid(double from, double to, std::size_t n) {
  require(from > 0.0 && to > 0.0 && to < from, ErrorKind::InvalidArgument,
          "sigma grid needs 0 < to < from");
  require(n >= 2, ErrorKind::InvalidArgument, "sigma grid needs at least two points");
  std::vector<double> grid(n);
  const double log_ratio = std::log(to / from) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) grid[i] = from * std::exp(log_ratio * static_cast<double>(i));
  grid.back() = to;
  return grid;
}

std::string_view to_string(LimitRow row) {
  switch (row) {
    case LimitRow::Discrete: return "discrete";
    case LimitRow::BoundedContinuous: return "bounded_continuous";
    case LimitRow::PowerTailContinuous: return "power_tail_continuous";
    case LimitRow::Mixture: return "mixture";
    case LimitRow::None: return "none";
  }
  return "none";
}

std::optional<int> continuous_label(const PriorSpec& prior) {
  if (prior.kind() != PriorSpec::Kind::Mixture) return std::nullopt;
  const MixturePrior& m = prior.as_mixture();
  if (m.first->purely_discrete() && m.second->purely_continuous()) return 2;
  if (m.first->purely_continuous() && m.second->purely_discrete()) return 1;
  return std::nullopt;
}

LimitRow classify_limit_row(const PriorSpec& prior, const NoiseSpec& noise) {
  const NoiseFlags& f = noise.flags();
  if (prior.purely_discrete()) {
    // f_Z bounded and o(|z|^-1).
    if (f.bounded_density && noise.tail_exponent() > 1.0) return LimitRow::Discrete;
    return LimitRow::None;
  }
  if (prior.kind() == PriorSpec::Kind::Continuous) {
    const ContinuousPrior& c = prior.as_continuous();
    if (c.bounded_density && c.continuous_density && f.in_l1) return LimitRow::BoundedContinuous;
    if (f.bounded_density && noise.tail_exponent() > 2.0) return LimitRow::PowerTailContinuous;
    return LimitRow::None;
  }
  if (continuous_label(prior) && f.doob) return LimitRow::Mixture;
  return LimitRow::None;
}

double predicted_limit(LimitRow row, const RealizationPath& path, const PriorSpec& prior,
                       const NoiseSpec& noise) {
  switch (row) {
    case LimitRow::Discrete: return 0.0;
    case LimitRow::BoundedContinuous:
    case LimitRow::PowerTailContinuous: return noise.mean() - path.z;
    case LimitRow::Mixture: {
      const auto label = continuous_label(prior);
      require(path.u.has_value(), ErrorKind::InvalidArgument, "mixture path needs a component label");
      return (label && *path.u == *label) ? noise.mean() - path.z : 0.0;
    }
    case LimitRow::None: break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> SweepReport::deviations() const {
  std::vector<double> d(e_values.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::abs(e_values[i] - predicted_limit);
  return d;
}

bool SweepReport::all_evaluated() const {
  return std::all_of(failures.begin(), failures.end(), [](const std::string& s) { return s.empty(); });
}

bool nonincreasing_tail(std::span<const double> sigma_grid, std::span<const double> values,
                        double decade, double slack) {
  require(sigma_grid.size() == values.size(), ErrorKind::InvalidArgument,
          "grid and values differ in length");
  if (sigma_grid.empty()) return true;
  const double cutoff = sigma_grid.back() * decade * (1.0 + 1e-12);
  double previous = kInf;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (sigma_grid[i] > cutoff) continue;
    if (!std::isfinite(values[i])) return false;
    if (values[i] > previous + slack) return false;
    previous = values[i];
  }
  return true;
}

bool SweepReport::tail_nonincreasing(double decade, double slack) const {
  const auto d = deviations();
  return nonincreasing_tail(sigma_grid, d, decade, slack);
}

std::vector<double> max_deviation_profile(std::span<const SweepReport> reports) {
  if (reports.empty()) return {};
  std::vector<double> out(reports.front().sigma_grid.size(), 0.0);
  for (const auto& r : reports) {
    require(r.sigma_grid.size() == out.size(), ErrorKind::InvalidArgument,
            "sweep reports use different sigma grids");
    const auto d = r.deviations();
    for (std::size_t i = 0; i < d.size(); ++i) {
      out[i] = std::isnan(d[i]) ? d[i] : std::max(out[i], d[i]);
    }
  }
  return out;
}

NoPredictionError::NoPredictionError(SweepReport report)
    : Error(ErrorKind::NoPrediction, "no small-noise limit applies to this prior/noise pair"),
      report_(std::move(report)) {}

namespace {

void check_grid(std::span<const double> grid) {
  require(!grid.empty(), ErrorKind::InvalidArgument, "sigma grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(grid[i] > 0.0 && std::isfinite(grid[i]), ErrorKind::InvalidSigma,
            "sigma grid values must be positive");
    if (i > 0) {
      require(grid[i] < grid[i - 1], ErrorKind::InvalidArgument,
              "sigma grid must be strictly decreasing");
    }
  }
}

// E_sigma along the path, or NaN plus a message.
double e_value(const RealizationPath& path, const PriorSpec& prior, const NoiseSpec& noise,
               double sigma, std::string& failure) {
  try {
    return normalized_error(path.x, path.z, prior, noise, sigma);
  } catch (const Error& e) {
    failure = e.what();
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

SweepReport pathwise_sweep(const RealizationPath& path, const PriorSpec& prior,
                           const NoiseSpec& noise, std::span<const double> sigma_grid,
                           bool track_second_moment) {
  check_grid(sigma_grid);
  SweepReport r;
  r.path = path;
  r.sigma_grid.assign(sigma_grid.begin(), sigma_grid.end());
  r.e_values.resize(sigma_grid.size());
  r.failures.resize(sigma_grid.size());
  for (std::size_t i = 0; i < sigma_grid.size(); ++i) {
    r.e_values[i] = e_value(path, prior, noise, sigma_grid[i], r.failures[i]);
  }
  if (track_second_moment) {
    std::vector<double> track(sigma_grid.size());
    for (std::size_t i = 0; i < sigma_grid.size(); ++i) {
      track[i] = mmse_dimension_estimate(prior, noise, sigma_grid[i], MmseMethod::Quadrature).value;
    }
    r.second_moment_track = std::move(track);
  }
  r.row = classify_limit_row(prior, noise);
  if (r.row == LimitRow::None) {
    r.predicted_limit = std::numeric_limits<double>::quiet_NaN();
    r.terminal_deviation = std::numeric_limits<double>::quiet_NaN();
    throw NoPredictionError(std::move(r));
  }
  r.predicted_limit = predicted_limit(r.row, path, prior, noise);
  r.terminal_deviation = std::abs(r.e_values.back() - r.predicted_limit);
  return r;
}

bool DecompositionReport::tail_nonincreasing(std::size_t last, double slack) const {
  if (deviations.size() < 2) return true;
  const std::size_t start = deviations.size() > last ? deviations.size() - last : 0;
  for (std::size_t i = start + 1; i < deviations.size(); ++i) {
    if (!(deviations[i] <= deviations[i - 1] + slack)) return false;
  }
  return true;
}

DecompositionReport decomposition_check(const RealizationPath& path, const PriorSpec& mixture,
                                        const NoiseSpec& noise,
                                        std::span<const double> sigma_grid) {
  require(mixture.kind() == PriorSpec::Kind::Mixture, ErrorKind::InvalidPrior,
          "decomposition check needs a mixture prior");
  require(path.u.has_value() && (*path.u == 1 || *path.u == 2), ErrorKind::InvalidArgument,
          "decomposition check needs a path with component label 1 or 2");
  check_grid(sigma_grid);
  const MixturePrior& m = mixture.as_mixture();
  const PriorSpec& component = *path.u == 1 ? *m.first : *m.second;

  DecompositionReport r;
  r.path = path;
  r.sigma_grid.assign(sigma_grid.begin(), sigma_grid.end());
  const std::size_t n = sigma_grid.size();
  r.e_values.resize(n);
  r.component_e_values.resize(n);
  r.deviations.resize(n);
  r.failures.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string f1, f2;
    r.e_values[i] = e_value(path, mixture, noise, sigma_grid[i], f1);
    r.component_e_values[i] = e_value(path, component, noise, sigma_grid[i], f2);
    r.failures[i] = f1.empty() ? f2 : f1;
    r.deviations[i] = std::abs(r.e_values[i] - r.component_e_values[i]);
  }
  r.final_deviation = r.deviations.back();
  return r;
}

namespace {

void collect_y_marks(const PriorSpec& prior, double s, std::vector<double>& out) {
  auto around = [&](double c) {
    out.push_back(c);
    for (double k : {1.0, 4.0, 16.0}) {
      out.push_back(c - k * s);
      out.push_back(c + k * s);
    }
  };
  switch (prior.kind()) {
    case PriorSpec::Kind::Discrete:
      for (const Atom& a : prior.as_discrete().atoms) around(a.location);
      break;
    case PriorSpec::Kind::Continuous: {
      const ContinuousPrior& c = prior.as_continuous();
      around(c.domain.lo);
      around(c.domain.hi);
      for (double l : c.landmarks) out.push_back(l);
      for (int k = 1; k < 16; ++k) out.push_back(c.domain.lo + c.domain.width() * k / 16.0);
      break;
    }
    case PriorSpec::Kind::Mixture:
      collect_y_marks(*prior.as_mixture().first, s, out);
      collect_y_marks(*prior.as_mixture().second, s, out);
      break;
  }
}

}  // namespace

MmseEstimate mmse_dimension_estimate(const PriorSpec& prior, const NoiseSpec& noise, double sigma,
                                     MmseMethod method, std::size_t n, std::uint64_t seed,
                                     unsigned threads) {
  require(sigma > 0.0 && std::isfinite(sigma), ErrorKind::InvalidSigma, "sigma must be positive");
  if (!std::isfinite(noise.variance())) {
    throw Error(ErrorKind::DivergentMoment, "noise " + noise.describe() + " has infinite variance");
  }
  MmseEstimate out;
  out.method = method;
  if (method == MmseMethod::MonteCarlo) {
    const auto e = simulate_errors(prior, noise, sigma, n, seed, threads, ErrorScale::Normalized);
    const auto& s = e.samples();
    double sum = 0.0;
    for (double v : s) sum += v * v;
    const double mean = sum / static_cast<double>(s.size());
    double ss = 0.0;
    for (double v : s) ss += (v * v - mean) * (v * v - mean);
    const double var = ss / static_cast<double>(s.size() - 1);
    out.value = mean;
    out.error = std::sqrt(var / static_cast<double>(s.size()));
    return out;
  }

  std::vector<double> pts{-kInf, kInf};
  collect_y_marks(prior, sigma * noise.scale(), pts);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const double s3 = sigma * sigma * sigma;
  quad::Options opt;
  opt.rel_tol = 1e-9;
  opt.abs_tol = 1e-14;
  opt.max_segments = 4000;
  double err = 0.0;
  out.value = quad::integrate_scalar(
      [&](double y) {
        if (!std::isfinite(y)) return 0.0;
        try {
          const PosteriorMoments m = posterior_moments(y, prior, noise, sigma);
          return std::exp(m.log_normalizer) * m.variance / s3;
        } catch (const Error& e) {
          if (e.kind() == ErrorKind::UnderflowExhausted) return 0.0;
          throw;
        }
      },
      std::span<const double>(pts), opt, &err);
  out.error = err;
  return out;
}

double mmse_dimension_limit(const PriorSpec& prior, const NoiseSpec& noise) {
  return prior.continuous_mass() * noise.variance();
}

std::string_view to_string(Flag flag) {
  switch (flag) {
    case Flag::AnalyticTrue: return "analytic_true";
    case Flag::AnalyticFalse: return "analytic_false";
    case Flag::Unchecked: return "unchecked";
  }
  return "unchecked";
}

bool DoobRecord::doob() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](Flag f) { return f == Flag::AnalyticTrue; });
}

DoobRecord doob_registry_lookup(const NoiseSpec& noise) {
  DoobRecord r;
  r.noise_name = noise.describe();
  bool known = noise.is_gaussian();
  for (const auto& entry : noise_registry()) {
    if (entry.noise.family() == noise.family() && entry.noise.parameters() == noise.parameters()) {
      known = true;
      r.noise_name = entry.name;
    }
  }
  if (!known) return r;
  if (noise.is_gaussian()) r.conditions.fill(Flag::AnalyticTrue);

  // A1: f_Z and |z| f_Z bounded, spot-checked on |z| <= 1e3.
  double sup_f = 0.0;
  double sup_zf = 0.0;
  constexpr int kSteps = 200000;
  for (int i = 0; i <= kSteps; ++i) {
    const double z = -1e3 + 2e3 * static_cast<double>(i) / kSteps;
    const double f = noise.pdf(z);
    sup_f = std::max(sup_f, f);
    sup_zf = std::max(sup_zf, std::abs(z) * f);
  }
  r.sup_pdf = sup_f;
  r.sup_z_pdf = sup_zf;
  r.a1_numeric_pass = std::isfinite(sup_f) && std::isfinite(sup_zf);

  // Tail exponent from a least-squares fit of log f against log |z|.
  constexpr int kFit = 64;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  bool vanishes = false;
  for (int k = 0; k < kFit; ++k) {
    const double z = 10.0 * std::pow(100.0, static_cast<double>(k) / (kFit - 1));
    const double f = 0.5 * (noise.pdf(z) + noise.pdf(-z));
    if (!(f > 0.0)) {
      vanishes = true;
      break;
    }
    const double lx = std::log(z);
    const double ly = std::log(f);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  if (vanishes) {
    r.fitted_tail_exponent = kInf;
  } else {
    const double slope = (kFit * sxy - sx * sy) / (kFit * sxx - sx * sx);
    r.fitted_tail_exponent = -slope;
  }
  const double expected = noise.tail_exponent();
  if (std::isinf(expected)) {
    r.tail_consistent = std::isinf(*r.fitted_tail_exponent) || *r.fitted_tail_exponent > 20.0;
  } else {
    r.tail_consistent = std::abs(*r.fitted_tail_exponent - expected) <= 0.05 * expected + 0.05;
  }
  return r;
}

}  // namespace esterr
