#include "esterr/error_density.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "esterr/errors.hpp"
#include "esterr/parallel.hpp"
#include "esterr/quadrature.hpp"

namespace esterr {

namespace {

double capped_inverse(double slope) {
  if (!(slope > 1.0 / kDerivativeCap)) return kDerivativeCap;
  return 1.0 / slope;
}

// Per-x contribution (1/sigma) f_Z((g^-1(x - w) - x)/sigma) |d g^-1(x - w)/dw| 1{x - w in R}.
// The target x - w is passed as (x, -w) so that |w| below the spacing of
// doubles near x still resolves.
template <class Inverse>
double contribution(double x, double w, Interval range, const Inverse& inverse,
                    const NoiseSpec& noise, double sigma) {
  if (!(-w > range.lo - x && -w < range.hi - x)) return 0.0;
  InversePoint p;
  try {
    p = inverse(x, -w);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::OutOfRange) return 0.0;
    throw;
  }
  const double f = noise.pdf((p.y - x) / sigma);
  if (f == 0.0) return 0.0;
  return f * std::min(std::abs(p.derivative), kDerivativeCap) / sigma;
}

std::vector<double> sorted_points(std::vector<double> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

// E over X of h(x), with X restricted to (w + range) for continuous parts.
template <class H>
double expectation(const PriorSpec& prior, double w, Interval range, const H& h) {
  switch (prior.kind()) {
    case PriorSpec::Kind::Discrete: {
      double total = 0.0;
      for (const Atom& a : prior.as_discrete().atoms) total += a.mass * h(a.location);
      return total;
    }
    case PriorSpec::Kind::Continuous: {
      const ContinuousPrior& c = prior.as_continuous();
      Interval window = c.domain.intersect({w + range.lo, w + range.hi});
      if (!c.support.finite() && std::isfinite(c.variance)) {
        const double reach = 12.0 * std::sqrt(c.variance);
        window = window.intersect({c.mean - reach, c.mean + reach});
      }
      if (window.empty()) return 0.0;
      std::vector<double> pts{window.lo, window.hi};
      for (int k = 1; k < 4; ++k) pts.push_back(window.lo + window.width() * k / 4.0);
      pts = sorted_points(std::move(pts));
      quad::Options opt;
      opt.rel_tol = 1e-9;
      opt.max_segments = 400;
      return quad::integrate_scalar(
          [&](double x) {
            const double lp = c.log_pdf(x);
            if (!(lp > -80.0)) return 0.0;
            return std::exp(lp) * h(x);
          },
          std::span<const double>(pts), opt);
    }
    case PriorSpec::Kind::Mixture: {
      const MixturePrior& m = prior.as_mixture();
      return m.alpha * expectation(*m.first, w, range, h) +
             (1.0 - m.alpha) * expectation(*m.second, w, range, h);
    }
  }
  return 0.0;
}

double gaussian_pdf(double u, double var) {
  return std::exp(-0.5 * u * u / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

// phi_sigma(u) = N(0, sigma^2) density.
double phi_sigma(double u, double sigma) { return gaussian_pdf(u, sigma * sigma); }

void collect_edges(const PriorSpec& prior, Interval range, std::vector<double>& hull_edges,
                   std::vector<double>& atom_edges) {
  switch (prior.kind()) {
    case PriorSpec::Kind::Discrete:
      for (const Atom& a : prior.as_discrete().atoms) {
        if (std::isfinite(range.lo)) atom_edges.push_back(a.location - range.lo);
        if (std::isfinite(range.hi)) atom_edges.push_back(a.location - range.hi);
      }
      break;
    case PriorSpec::Kind::Continuous: {
      const Interval h = prior.hull();
      for (double x : {h.lo, h.hi}) {
        if (!std::isfinite(x)) continue;
        if (std::isfinite(range.lo)) hull_edges.push_back(x - range.lo);
        if (std::isfinite(range.hi)) hull_edges.push_back(x - range.hi);
      }
      break;
    }
    case PriorSpec::Kind::Mixture:
      collect_edges(*prior.as_mixture().first, range, hull_edges, atom_edges);
      collect_edges(*prior.as_mixture().second, range, hull_edges, atom_edges);
      break;
  }
}

struct Partition {
  std::vector<double> breakpoints;
  std::vector<double> edges;
};

std::vector<double> inside(const std::vector<double>& pts, Interval support) {
  std::vector<double> out;
  for (double p : pts) {
    if (support.contains_open(p)) out.push_back(p);
  }
  return sorted_points(std::move(out));
}

// Atom edges are where the error density piles up on a logarithmic scale
// (the estimator approaches its range end exponentially fast).
Partition density_partition(const PriorSpec& prior, Interval range, Interval support,
                            double sigma, const NoiseSpec& noise) {
  std::vector<double> pts;
  std::vector<double> edges;
  collect_edges(prior, range, pts, edges);
  pts.insert(pts.end(), edges.begin(), edges.end());
  pts.push_back(0.0);
  const double s = sigma * noise.scale();
  for (double k : {0.25, 1.0, 4.0, 16.0}) {
    pts.push_back(-k * s);
    pts.push_back(k * s);
  }
  return {inside(pts, support), inside(edges, support)};
}

}  // namespace

InvertibleEstimator mmse_estimator(const InverseMap& map) {
  const InverseMap* m = &map;
  return {map.range(), [m](double reference, double delta) {
            InversePoint p;
            p.y = m->query_offset(reference, delta);
            p.derivative = capped_inverse(m->curve().slope(p.y, reference + delta));
            return p;
          }};
}

InvertibleEstimator linear_estimator(double slope, double intercept) {
  require(std::isfinite(slope) && slope != 0.0 && std::isfinite(intercept),
          ErrorKind::InvalidArgument, "linear estimator needs a finite nonzero slope");
  return {{-kInf, kInf}, [slope, intercept](double reference, double delta) {
            return InversePoint{(reference + delta - intercept) / slope, 1.0 / slope};
          }};
}

double error_pdf_general(double w, const InvertibleEstimator& g, const PriorSpec& prior,
                         const NoiseSpec& noise, double sigma) {
  require(sigma > 0.0 && std::isfinite(sigma), ErrorKind::InvalidSigma, "sigma must be positive");
  return expectation(prior, w, g.range, [&](double x) {
    return contribution(x, w, g.range, g.inverse, noise, sigma);
  });
}

double error_pdf_mmse(double w, const InverseMap& map) {
  const PosteriorCurve& c = map.curve();
  return error_pdf_general(w, mmse_estimator(map), c.prior(), c.noise(), c.sigma());
}

double error_pdf_mmse(double w, const PriorSpec& prior, const NoiseSpec& noise, double sigma) {
  const InverseMap map(build_curve(prior, noise, sigma));
  return error_pdf_mmse(w, map);
}

double error_pdf_gaussian_specialized(double w, const InverseMap& map) {
  const PosteriorCurve& c = map.curve();
  if (!c.noise().is_gaussian()) {
    throw Error(ErrorKind::UnsupportedMode, "variance form needs Gaussian noise");
  }
  const double sigma = c.sigma();
  const double noise_var = sigma * sigma * c.noise().variance();
  auto inverse = [&](double reference, double delta) {
    InversePoint p;
    p.y = map.query_offset(reference, delta);
    const double v = c.moments(p.y, reference).variance;
    p.derivative = v > noise_var / kDerivativeCap ? noise_var / v : kDerivativeCap;
    return p;
  };
  const Interval range = map.range();
  return expectation(c.prior(), w, range, [&](double x) {
    return contribution(x, w, range, inverse, c.noise(), sigma);
  });
}

double closed_form_binary(double w, double p, double sigma) {
  require(p > 0.0 && p < 1.0, ErrorKind::InvalidPrior, "p must lie in (0, 1)");
  require(sigma > 0.0, ErrorKind::InvalidSigma, "sigma must be positive");
  const double s = sigma * w;
  const double s2 = sigma * sigma;
  const double s3 = s2 * sigma;
  const double odds = (1.0 - p) / p;
  if (s > 0.0 && s < 2.0) {
    const double arg = 0.5 * s2 * std::log((2.0 - s) / s * odds) - 1.0;
    return phi_sigma(arg, sigma) * s3 * p / (s * (2.0 - s));
  }
  if (s < 0.0 && s > -2.0) {
    const double arg = 0.5 * s2 * std::log((-s) / (2.0 + s) * odds) + 1.0;
    return phi_sigma(arg, sigma) * s3 * (1.0 - p) / ((-s) * (2.0 + s));
  }
  return 0.0;
}

double closed_form_binary_symmetric(double w, double sigma) {
  require(sigma > 0.0, ErrorKind::InvalidSigma, "sigma must be positive");
  const double a = std::abs(sigma * w);
  if (!(a > 0.0 && a < 2.0)) return 0.0;
  const double s2 = sigma * sigma;
  const double arg = 0.5 * s2 * std::log((2.0 - a) / a) - 1.0;
  return 0.5 * phi_sigma(arg, sigma) * s2 * sigma / (1.0 - (1.0 - a) * (1.0 - a));
}

double closed_form_gaussian(double w, double prior_var, double noise_var, double sigma) {
  require(prior_var > 0.0 && noise_var > 0.0, ErrorKind::InvalidArgument,
          "variances must be positive");
  require(sigma > 0.0, ErrorKind::InvalidSigma, "sigma must be positive");
  const double n = sigma * sigma * noise_var;
  return gaussian_pdf(w, prior_var * n / (prior_var + n));
}

std::string_view to_string(DensityMode mode) {
  switch (mode) {
    case DensityMode::GeneralG: return "general_g";
    case DensityMode::Mmse: return "mmse";
    case DensityMode::GaussianSpecialized: return "gaussian_specialized";
    case DensityMode::ClosedFormBinary: return "closed_form_binary";
    case DensityMode::ClosedFormGaussian: return "closed_form_gaussian";
  }
  return "unknown";
}

ErrorDensity::ErrorDensity(std::function<double(double)> raw_pdf, Interval support,
                           std::vector<double> breakpoints, std::vector<double> edges,
                           DensityMode mode, ErrorScale scale, double sigma)
    : raw_(std::move(raw_pdf)),
      support_(support),
      breaks_(std::move(breakpoints)),
      edges_(std::move(edges)),
      mode_(mode),
      scale_(scale),
      sigma_(sigma) {
  require(sigma > 0.0 && std::isfinite(sigma), ErrorKind::InvalidSigma, "sigma must be positive");
  require(!support_.empty(), ErrorKind::InvalidArgument, "error support is empty");
  // Probe each side of each edge decade by decade until the decade mass
  // d f(e +/- d) is past its peak and negligible.
  for (double e : edges_) {
    for (double side : {-1.0, 1.0}) {
      double peak = 0.0, previous = kInf;
      for (int k = 0; k <= 330; ++k) {
        const double d = sigma_ * std::pow(10.0, -k);
        const double w = e + side * d;
        if (w == e || d == 0.0) break;
        const double v = support_.contains_open(w) ? d * raw_(w) : 0.0;
        edge_depth_ = std::max(edge_depth_, k);
        peak = std::max(peak, v);
        if (k >= 15 && peak > 0.0 && v < previous && v <= 1e-15 * peak) break;
        previous = v;
      }
    }
  }
  std::vector<double> pts{support_.lo, support_.hi};
  pts.insert(pts.end(), breaks_.begin(), breaks_.end());
  for (double e : edges_) {
    for (int k = 0; k <= edge_depth_; ++k) {
      const double d = sigma_ * std::pow(10.0, -k);
      pts.push_back(e - d);
      pts.push_back(e + d);
    }
  }
  std::erase_if(pts, [&](double p) { return !support_.contains_closed(p); });
  pts = sorted_points(std::move(pts));
  quad::Options opt;
  opt.rel_tol = 1e-7;
  opt.abs_tol = 1e-12;
  opt.max_segments = 1000;
  normalization_ = quad::integrate_scalar(
      [this](double w) { return support_.contains_open(w) ? raw_(w) : 0.0; },
      std::span<const double>(pts), opt);
}

double ErrorDensity::query(double w) const {
  if (scale_ == ErrorScale::Normalized) {
    const double u = sigma_ * w;
    return support_.contains_open(u) ? sigma_ * raw_(u) : 0.0;
  }
  return support_.contains_open(w) ? raw_(w) : 0.0;
}

Interval ErrorDensity::support_hint() const {
  if (scale_ == ErrorScale::Normalized) return {support_.lo / sigma_, support_.hi / sigma_};
  return support_;
}

namespace {

std::vector<double> rescale(const std::vector<double>& v, ErrorScale scale, double sigma) {
  if (scale == ErrorScale::Raw) return v;
  std::vector<double> out;
  out.reserve(v.size());
  for (double b : v) out.push_back(b / sigma);
  return out;
}

}  // namespace

std::vector<double> ErrorDensity::breakpoints() const { return rescale(breaks_, scale_, sigma_); }

std::vector<double> ErrorDensity::edges() const { return rescale(edges_, scale_, sigma_); }

double ErrorDensity::edge_unit() const { return scale_ == ErrorScale::Raw ? sigma_ : 1.0; }

bool ErrorDensity::normalized_within(double tol) const {
  return std::abs(normalization_ - 1.0) <= tol;
}

Interval error_support(const PriorSpec& prior, Interval estimator_range) {
  const Interval h = prior.hull();
  return {h.lo - estimator_range.hi, h.hi - estimator_range.lo};
}

ErrorDensity make_mmse_density(const InverseMap& map, DensityMode mode, ErrorScale scale) {
  const PosteriorCurve& c = map.curve();
  const Interval support = error_support(c.prior(), map.range());
  auto part = density_partition(c.prior(), map.range(), support, c.sigma(), c.noise());
  auto owned = std::make_shared<const InverseMap>(map);
  std::function<double(double)> raw;
  switch (mode) {
    case DensityMode::Mmse:
      raw = [owned](double w) { return error_pdf_mmse(w, *owned); };
      break;
    case DensityMode::GaussianSpecialized:
      if (!c.noise().is_gaussian()) {
        throw Error(ErrorKind::UnsupportedMode, "variance form needs Gaussian noise");
      }
      raw = [owned](double w) { return error_pdf_gaussian_specialized(w, *owned); };
      break;
    default:
      throw Error(ErrorKind::UnsupportedMode,
                  "mode " + std::string(to_string(mode)) + " is not built from an inverse map");
  }
  return ErrorDensity(std::move(raw), support, std::move(part.breakpoints), std::move(part.edges),
                      mode, scale, c.sigma());
}

ErrorDensity make_general_density(InvertibleEstimator g, const PriorSpec& prior,
                                  const NoiseSpec& noise, double sigma, ErrorScale scale) {
  const Interval support = error_support(prior, g.range);
  auto part = density_partition(prior, g.range, support, sigma, noise);
  auto raw = [g = std::move(g), prior, noise, sigma](double w) {
    return error_pdf_general(w, g, prior, noise, sigma);
  };
  return ErrorDensity(std::move(raw), support, std::move(part.breakpoints), std::move(part.edges),
                      DensityMode::GeneralG, scale, sigma);
}

ErrorDensity make_binary_density(double p, double sigma, ErrorScale scale) {
  require(p > 0.0 && p < 1.0, ErrorKind::InvalidPrior, "p must lie in (0, 1)");
  auto raw = [p, sigma](double w) { return closed_form_binary(w / sigma, p, sigma) / sigma; };
  return ErrorDensity(std::move(raw), {-2.0, 2.0}, {0.0}, {0.0}, DensityMode::ClosedFormBinary,
                      scale, sigma);
}

ErrorDensity make_gaussian_density(double prior_var, double noise_var, double sigma,
                                   ErrorScale scale) {
  auto raw = [=](double w) { return closed_form_gaussian(w, prior_var, noise_var, sigma); };
  const double sd = std::sqrt(prior_var * sigma * sigma * noise_var /
                              (prior_var + sigma * sigma * noise_var));
  std::vector<double> breaks;
  for (double k : {-8.0, -2.0, 0.0, 2.0, 8.0}) breaks.push_back(k * sd);
  return ErrorDensity(std::move(raw), {-kInf, kInf}, std::move(breaks), {},
                      DensityMode::ClosedFormGaussian, scale, sigma);
}

std::vector<DensityRow> emit_density_curve(const ErrorDensity& density,
                                           std::span<const double> grid, unsigned threads) {
  std::vector<DensityRow> rows(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    rows[i] = {grid[i], density.query(grid[i])};
  });
  return rows;
}

}  // namespace esterr
