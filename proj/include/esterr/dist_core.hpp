#pragma once

// Distribution specifications for the signal X and the additive noise Z in
// Y = X + sigma * Z: densities, sampling, moments and analytic flags.

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace esterr {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo = -kInf;
  double hi = kInf;

  bool empty() const { return !(lo < hi); }
  bool finite() const { return lo > -kInf && hi < kInf; }
  double width() const { return hi - lo; }
  bool contains_open(double x) const { return x > lo && x < hi; }
  bool contains_closed(double x) const { return x >= lo && x <= hi; }
  Interval intersect(const Interval& o) const {
    return {lo > o.lo ? lo : o.lo, hi < o.hi ? hi : o.hi};
  }
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

// Counter-based stream: one independent generator per (seed, stream index).
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

// ---------------------------------------------------------------------------
// Noise

enum class NoiseFamily { Gaussian, Laplace, Uniform, StudentT };

struct NoiseFlags {
  bool bounded_density = true;
  bool strictly_log_concave = false;
  bool doob = false;
  bool in_l1 = true;
};

class NoiseSpec {
 public:
  static NoiseSpec gaussian(double mean = 0.0, double sd = 1.0);
  static NoiseSpec laplace(double location = 0.0, double scale = 1.0);
  static NoiseSpec uniform(double a = -1.0, double b = 1.0);
  static NoiseSpec student_t(double nu);

  NoiseFamily family() const { return family_; }
  const std::string& name() const { return name_; }
  /// Canonical short description including parameters, e.g. "student_t(nu=3)".
  std::string describe() const;

  double pdf(double z) const;
  /// log f_Z(z); -inf outside the support.
  double log_pdf(double z) const;
  Interval support() const { return support_; }

  /// NaN when Z is not in L1.
  double mean() const { return mean_; }
  /// +inf when the variance diverges.
  double variance() const { return variance_; }
  /// alpha with f_Z(z) = O(|z|^-alpha); +inf for super-polynomial decay.
  double tail_exponent() const { return tail_exponent_; }
  /// sup_z |z|^alpha f_Z(z) for finite tail exponents.
  double tail_constant() const { return tail_constant_; }
  const NoiseFlags& flags() const { return flags_; }

  /// Natural length scale of the density.
  double scale() const { return scale_; }
  double mode() const { return mode_; }
  /// Half-width of the window around a posterior peak (in z units) outside of
  /// which the integrand is negligible; +inf for heavy tails.
  double window_half_width() const { return window_; }
  /// Points where log f_Z is not smooth.
  const std::vector<double>& kinks() const { return kinks_; }

  double sample(std::mt19937_64& rng) const;

  bool is_gaussian() const { return family_ == NoiseFamily::Gaussian; }
  const std::vector<double>& parameters() const { return params_; }

 private:
  NoiseSpec() = default;
  void validate() const;

  NoiseFamily family_ = NoiseFamily::Gaussian;
  std::string name_;
  std::vector<double> params_;
  Interval support_;
  double mean_ = 0.0;
  double variance_ = 1.0;
  double tail_exponent_ = kInf;
  double tail_constant_ = 0.0;
  double scale_ = 1.0;
  double mode_ = 0.0;
  double window_ = kInf;
  double log_norm_ = 0.0;
  std::vector<double> kinks_;
  NoiseFlags flags_;
};

enum class Concavity { True, False, Inconclusive };

/// Numeric screen for strict concavity of log f_Z on its support.
Concavity check_strict_log_concavity(const NoiseSpec& noise, int grid_n = 16);

// ---------------------------------------------------------------------------
// Prior

struct Atom {
  double location = 0.0;
  double mass = 0.0;
};

struct DiscretePrior {
  std::vector<Atom> atoms;
};

struct ContinuousPrior {
  std::string name;
  std::function<double(double)> log_pdf;
  Interval support;
  /// Finite interval carrying all but a negligible part of the mass.
  Interval domain;
  /// Edges, modes and scale marks used to seed quadrature partitions.
  std::vector<double> landmarks;
  bool bounded_density = true;
  bool continuous_density = true;
  std::function<double(std::mt19937_64&)> sampler;
  double mean = 0.0;
  double variance = 0.0;
};

class PriorSpec;

struct MixturePrior {
  std::shared_ptr<const PriorSpec> first;
  std::shared_ptr<const PriorSpec> second;
  /// P[U = 1], the weight of `first`.
  double alpha = 0.5;
};

class PriorSpec {
 public:
  enum class Kind { Discrete, Continuous, Mixture };

  static PriorSpec discrete(std::vector<Atom> atoms);
  static PriorSpec point_mass(double location);
  /// P(X = 1) = p = 1 - P(X = -1).
  static PriorSpec binary(double p);
  static PriorSpec gaussian(double mean, double sd);
  static PriorSpec uniform(double a, double b);
  /// Beta(a, b) rescaled to [lo, hi]; a, b >= 1 so the density is bounded.
  static PriorSpec beta(double a, double b, double lo = 0.0, double hi = 1.0);
  /// User density; normalization is checked by quadrature over `domain`.
  static PriorSpec continuous(std::string name, std::function<double(double)> log_pdf,
                              Interval support, Interval domain, bool bounded_density,
                              bool continuous_density);
  static PriorSpec mixture(PriorSpec first, PriorSpec second, double alpha);

  Kind kind() const;
  const DiscretePrior& as_discrete() const { return std::get<DiscretePrior>(body_); }
  const ContinuousPrior& as_continuous() const { return std::get<ContinuousPrior>(body_); }
  const MixturePrior& as_mixture() const { return std::get<MixturePrior>(body_); }

  /// Closed convex hull of the support.
  Interval hull() const;
  std::string describe() const;

  /// Probability carried by absolutely continuous parts.
  double continuous_mass() const;
  /// True when every part is discrete / absolutely continuous.
  bool purely_discrete() const;
  bool purely_continuous() const;
  /// True when x can be drawn from the prior (atom or inside a density support).
  bool in_support(double x) const;

 private:
  explicit PriorSpec(std::variant<DiscretePrior, ContinuousPrior, MixturePrior> body)
      : body_(std::move(body)) {}
  std::variant<DiscretePrior, ContinuousPrior, MixturePrior> body_;
};

struct Draw {
  double x = 0.0;
  std::optional<int> label;
};

Draw draw(const PriorSpec& prior, std::mt19937_64& rng);

std::vector<double> sample(const PriorSpec& prior, std::size_t n, std::uint64_t seed);
std::vector<double> sample(const NoiseSpec& noise, std::size_t n, std::uint64_t seed);

Moments moments(const PriorSpec& prior);
/// Throws DivergentMoment when the variance is undefined (tail exponent <= 3).
Moments moments(const NoiseSpec& noise);

/// One realization (x, z, u) along which pathwise limits are observed.
struct RealizationPath {
  double x = 0.0;
  double z = 0.0;
  std::optional<int> u;
  std::uint64_t seed = 0;
};

RealizationPath draw_path(const PriorSpec& prior, const NoiseSpec& noise, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Built-in registry

struct NamedNoise {
  std::string name;
  NoiseSpec noise;
};

struct NamedPrior {
  std::string name;
  PriorSpec prior;
};

std::vector<NamedNoise> noise_registry();
std::vector<NamedPrior> prior_registry();

}  // namespace esterr
