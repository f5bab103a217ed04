#pragma once

// Conditional moments of X given Y = y for Y = X + sigma * Z.
//
// Expectations over X are weighted by f_Z((y - X) / sigma). Discrete priors
// use log-sum-exp over atoms; absolutely continuous priors are integrated in
// the noise coordinate t = (y - x) / sigma with weights shifted by their peak,
// so nothing underflows for small sigma. Every moment can be reported relative
// to a caller-chosen reference point r, which keeps differences such as
// x - E[X|Y] accurate when they are tiny compared with x.

#include <cstddef>
#include <optional>
#include <vector>

#include "esterr/dist_core.hpp"

namespace esterr {

struct PosteriorMoments {
  /// log E[f_Z((y - X) / sigma)] = log(sigma * f_Y(y)).
  double log_normalizer = 0.0;
  double reference = 0.0;
  /// E[X - reference | Y = y].
  double offset = 0.0;
  /// Var(X | Y = y), never negative.
  double variance = 0.0;

  double mean() const { return reference + offset; }
};

/// Evaluates all conditional moments at y. Throws UnderflowExhausted when the
/// log-normalizer falls below -700 (y unreachable in double precision).
PosteriorMoments posterior_moments(double y, const PriorSpec& prior, const NoiseSpec& noise,
                                   double sigma, double reference = 0.0);

double posterior_mean(double y, const PriorSpec& prior, const NoiseSpec& noise, double sigma);
double posterior_variance(double y, const PriorSpec& prior, const NoiseSpec& noise, double sigma);
/// E[Z | Y = y] = (y - E[X | Y = y]) / sigma.
double posterior_mean_z(double y, const PriorSpec& prior, const NoiseSpec& noise, double sigma);

/// (x - E[X | Y = x + sigma z]) / sigma, computed without cancellation.
double normalized_error(double x, double z, const PriorSpec& prior, const NoiseSpec& noise,
                        double sigma);

/// Centered difference of the posterior mean with h = max(1e-6, 1e-6 |y|).
/// Near a finite end of the support hull the difference is taken on the offset
/// from that end, which the engine resolves to full relative precision.
/// `mean_hint`, when the caller already knows E[X | Y = y], only selects that reference.
double posterior_mean_slope(double y, const PriorSpec& prior, const NoiseSpec& noise,
                            double sigma, std::optional<double> mean_hint = std::nullopt);

/// Default y-window: hull of X inflated by 6 sigma * scale(Z) on both sides,
/// with infinite hulls replaced by the prior's integration domain.
/// For bounded noise the window stays inside hull + sigma * support(Z).
Interval default_y_range(const PriorSpec& prior, const NoiseSpec& noise, double sigma);

enum class Monotonicity { Strict, Nondecreasing, Failed };

struct CurvePoint {
  double y = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

class PosteriorCurve {
 public:
  PosteriorCurve(PriorSpec prior, NoiseSpec noise, double sigma, Interval y_range,
                 std::size_t n_points);

  double sigma() const { return sigma_; }
  const PriorSpec& prior() const { return prior_; }
  const NoiseSpec& noise() const { return noise_; }
  const std::vector<CurvePoint>& grid() const { return grid_; }
  Monotonicity certificate() const { return certificate_; }
  /// Grid interval where monotonicity failed, if any.
  const std::optional<Interval>& witness() const { return witness_; }

  CurvePoint query(double y) const;
  PosteriorMoments moments(double y, double reference) const;
  double slope(double y, std::optional<double> mean_hint = std::nullopt) const;

 private:
  PriorSpec prior_;
  NoiseSpec noise_;
  double sigma_;
  std::vector<CurvePoint> grid_;
  Monotonicity certificate_ = Monotonicity::Failed;
  std::optional<Interval> witness_;
};

PosteriorCurve build_curve(const PriorSpec& prior, const NoiseSpec& noise, double sigma,
                           std::optional<Interval> y_range = std::nullopt,
                           std::size_t n_points = 257);

}  // namespace esterr
