#pragma once

// Density of the estimation error W = X - g(Y) for an estimator g with a
// functional inverse:
//
//   f_W(w) = (1/sigma) E[ f_Z((g^-1(X - w) - X) / sigma) |d g^-1(X - w)/dw| 1{X - w in R_g} ]
//
// and of the normalized error E_sigma = W / sigma, f_E(w) = sigma f_W(sigma w).

#include <functional>
#include <span>
#include <vector>

#include "esterr/inversion.hpp"

namespace esterr {

/// Estimator g described through its inverse at t = reference + delta:
/// (reference, delta) -> (g^-1(t), d g^-1/dt).
struct InvertibleEstimator {
  Interval range;
  std::function<InversePoint(double, double)> inverse;
};

/// Stands in for |d g^-1/dt| where the slope of g underflows to zero.
inline constexpr double kDerivativeCap = 1e300;

/// The posterior mean as an estimator: guarded range, numeric-slope derivative.
InvertibleEstimator mmse_estimator(const InverseMap& map);
/// g(y) = slope * y + intercept.
InvertibleEstimator linear_estimator(double slope, double intercept);

double error_pdf_general(double w, const InvertibleEstimator& g, const PriorSpec& prior,
                         const NoiseSpec& noise, double sigma);
double error_pdf_mmse(double w, const InverseMap& map);
/// Builds the posterior curve and its inverse, then evaluates at w.
double error_pdf_mmse(double w, const PriorSpec& prior, const NoiseSpec& noise, double sigma);
/// Gaussian-noise form: the inverse derivative comes from the conditional variance.
double error_pdf_gaussian_specialized(double w, const InverseMap& map);

template <class Pdf>
double normalized_error_pdf(double w, Pdf&& error_pdf, double sigma) {
  return sigma * error_pdf(sigma * w);
}

/// f_{E_sigma}(w) for X in {-1, +1} with P(X = 1) = p and standard Gaussian noise.
double closed_form_binary(double w, double p, double sigma);
/// The p = 1/2 display of the same density.
double closed_form_binary_symmetric(double w, double sigma);
/// f_W(w) for X ~ N(., prior_var) and Z ~ N(., noise_var): centered Gaussian with
/// variance prior_var sigma^2 noise_var / (prior_var + sigma^2 noise_var).
double closed_form_gaussian(double w, double prior_var, double noise_var, double sigma);

enum class DensityMode { GeneralG, Mmse, GaussianSpecialized, ClosedFormBinary, ClosedFormGaussian };
enum class ErrorScale { Raw, Normalized };

std::string_view to_string(DensityMode mode);

class ErrorDensity {
 public:
  /// `raw_pdf` is f_W; `support`, `breakpoints` and `edges` are in W units.
  /// Edges are points where the density concentrates on a logarithmic scale;
  /// quadrature is refined geometrically towards them.
  ErrorDensity(std::function<double(double)> raw_pdf, Interval support,
               std::vector<double> breakpoints, std::vector<double> edges, DensityMode mode,
               ErrorScale scale, double sigma);

  /// Density at w in the chosen scale; 0 outside the support hint.
  double query(double w) const;
  double operator()(double w) const { return query(w); }

  Interval support_hint() const;
  /// Quadrature breakpoints in the chosen scale.
  std::vector<double> breakpoints() const;
  std::vector<double> edges() const;
  /// Length over which the geometric refinement around edges starts, in the chosen scale.
  double edge_unit() const;
  /// Number of decades below edge_unit() that carry mass next to the edges.
  int edge_depth() const { return edge_depth_; }
  double normalization() const { return normalization_; }
  bool normalized_within(double tol = 1e-4) const;
  DensityMode mode() const { return mode_; }
  ErrorScale scale() const { return scale_; }
  double sigma() const { return sigma_; }

 private:
  std::function<double(double)> raw_;
  Interval support_;
  std::vector<double> breaks_;
  std::vector<double> edges_;
  DensityMode mode_;
  ErrorScale scale_;
  double sigma_;
  double normalization_ = 0.0;
  int edge_depth_ = 15;
};

/// Support hint {x - R_g : x in hull(X)}, in W units.
Interval error_support(const PriorSpec& prior, Interval estimator_range);

ErrorDensity make_mmse_density(const InverseMap& map, DensityMode mode = DensityMode::Mmse,
                               ErrorScale scale = ErrorScale::Raw);
ErrorDensity make_general_density(InvertibleEstimator g, const PriorSpec& prior,
                                  const NoiseSpec& noise, double sigma,
                                  ErrorScale scale = ErrorScale::Raw);
ErrorDensity make_binary_density(double p, double sigma, ErrorScale scale = ErrorScale::Raw);
ErrorDensity make_gaussian_density(double prior_var, double noise_var, double sigma,
                                   ErrorScale scale = ErrorScale::Raw);

struct DensityRow {
  double w = 0.0;
  double f = 0.0;
};

/// Rows in grid order; points are evaluated in parallel.
std::vector<DensityRow> emit_density_curve(const ErrorDensity& density,
                                           std::span<const double> grid, unsigned threads = 1);

}  // namespace esterr
