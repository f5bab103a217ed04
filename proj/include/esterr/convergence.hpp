#pragma once

// Small-noise behaviour of the normalized error E_sigma = (x - E[X | x + sigma z]) / sigma
// along fixed realizations, and of its second moment.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "esterr/errors.hpp"
#include "esterr/posterior.hpp"

namespace esterr {

/// n geometrically spaced values from `from` down to `to` (strictly decreasing).
std::vector<double> geometric_sigma_grid(double from = 1.0, double to = 1e-3, std::size_t n = 40);

enum class LimitRow { Discrete, BoundedContinuous, PowerTailContinuous, Mixture, None };

std::string_view to_string(LimitRow row);

/// Which limit theorem covers (prior, noise), if any.
LimitRow classify_limit_row(const PriorSpec& prior, const NoiseSpec& noise);

/// Limit of E_sigma along `path` under `row`; NaN for LimitRow::None.
double predicted_limit(LimitRow row, const RealizationPath& path, const PriorSpec& prior,
                       const NoiseSpec& noise);

/// Label of the absolutely continuous component of a two-part mixture (1 or 2), if any.
std::optional<int> continuous_label(const PriorSpec& prior);

struct SweepReport {
  RealizationPath path;
  std::vector<double> sigma_grid;
  /// NaN where the evaluation failed; see `failures`.
  std::vector<double> e_values;
  /// One entry per grid point; empty string when the evaluation succeeded.
  std::vector<std::string> failures;
  LimitRow row = LimitRow::None;
  double predicted_limit = 0.0;
  double terminal_deviation = 0.0;
  std::optional<std::vector<double>> second_moment_track;

  std::vector<double> deviations() const;
  bool all_evaluated() const;
  /// Deviations at sigma <= sigma_final * decade never increase by more than `slack`.
  bool tail_nonincreasing(double decade = 10.0, double slack = 1e-10) const;
};

class NoPredictionError : public Error {
 public:
  explicit NoPredictionError(SweepReport report);
  const SweepReport& report() const { return report_; }

 private:
  SweepReport report_;
};

/// E_sigma along the path for every sigma in the grid. Throws NoPredictionError
/// (carrying the e-values) when no limit row applies.
SweepReport pathwise_sweep(const RealizationPath& path, const PriorSpec& prior,
                           const NoiseSpec& noise, std::span<const double> sigma_grid,
                           bool track_second_moment = false);

/// Max over paths of |E_sigma - limit| at each grid point (paths share one grid).
std::vector<double> max_deviation_profile(std::span<const SweepReport> reports);

/// True when `values` never increase by more than `slack` over sigma <= sigma_final * decade.
bool nonincreasing_tail(std::span<const double> sigma_grid, std::span<const double> values,
                        double decade = 10.0, double slack = 1e-10);

struct DecompositionReport {
  RealizationPath path;
  std::vector<double> sigma_grid;
  std::vector<double> e_values;
  /// E_{u,sigma}: the same quantity under the component-u prior alone.
  std::vector<double> component_e_values;
  std::vector<double> deviations;
  std::vector<std::string> failures;
  double final_deviation = 0.0;

  bool tail_nonincreasing(std::size_t last = 3, double slack = 1e-12) const;
};

DecompositionReport decomposition_check(const RealizationPath& path, const PriorSpec& mixture,
                                        const NoiseSpec& noise,
                                        std::span<const double> sigma_grid);

enum class MmseMethod { Quadrature, MonteCarlo };

struct MmseEstimate {
  double value = 0.0;
  /// Quadrature error estimate, or the Monte-Carlo standard error.
  double error = 0.0;
  MmseMethod method = MmseMethod::Quadrature;
};

/// E[E_sigma^2]. Quadrature integrates Var(X | Y = y) / sigma^2 against f_Y;
/// Monte Carlo averages n seeded squared errors.
MmseEstimate mmse_dimension_estimate(const PriorSpec& prior, const NoiseSpec& noise, double sigma,
                                     MmseMethod method, std::size_t n = 1000000,
                                     std::uint64_t seed = 1, unsigned threads = 1);

/// Small-noise limit continuous_mass * Var(Z).
double mmse_dimension_limit(const PriorSpec& prior, const NoiseSpec& noise);

enum class Flag { AnalyticTrue, AnalyticFalse, Unchecked };

std::string_view to_string(Flag flag);

struct DoobRecord {
  std::string noise_name;
  /// Conditions A1..A5.
  std::array<Flag, 5> conditions{Flag::Unchecked, Flag::Unchecked, Flag::Unchecked,
                                 Flag::Unchecked, Flag::Unchecked};
  /// sup over |z| <= 1e3 of f_Z and |z| f_Z; absent for unknown noise.
  std::optional<double> sup_pdf;
  std::optional<double> sup_z_pdf;
  bool a1_numeric_pass = false;
  /// Log-log slope fit of f_Z on 10 <= |z| <= 1000; +inf when f_Z decays faster than any power.
  std::optional<double> fitted_tail_exponent;
  bool tail_consistent = false;

  bool doob() const;
};

/// Looks `noise` up by name in the noise registry; unknown names give an all-unchecked record.
DoobRecord doob_registry_lookup(const NoiseSpec& noise);

}  // namespace esterr
