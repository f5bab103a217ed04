#include "esterr/posterior.hpp"

#include <algorithm>
#include <cmath>

#include "esterr/errors.hpp"
#include "esterr/quadrature.hpp"

namespace esterr {

namespace {

constexpr double kLogFloor = -700.0;

struct Partial {
  double log_norm = -kInf;
  double offset = 0.0;
  double variance = 0.0;
};

Partial discrete_part(double y, const DiscretePrior& d, const NoiseSpec& noise, double sigma,
                      double reference) {
  const auto& atoms = d.atoms;
  std::vector<double> lw(atoms.size());
  double top = -kInf;
  std::size_t arg = 0;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    lw[j] = std::log(atoms[j].mass) + noise.log_pdf((y - atoms[j].location) / sigma);
    if (lw[j] > top) {
      top = lw[j];
      arg = j;
    }
  }
  Partial out;
  if (top == -kInf) return out;
  const double pivot = atoms[arg].location;
  double s = 0.0, s1 = 0.0, d1 = 0.0, d2 = 0.0;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    const double w = std::exp(lw[j] - top);
    if (w == 0.0) continue;
    const double dx = atoms[j].location - pivot;
    s += w;
    s1 += w * (atoms[j].location - reference);
    d1 += w * dx;
    d2 += w * dx * dx;
  }
  out.log_norm = top + std::log(s);
  out.offset = s1 / s;
  const double m = d1 / s;
  out.variance = std::max(0.0, d2 / s - m * m);
  return out;
}

Partial continuous_part(double y, const ContinuousPrior& c, const NoiseSpec& noise,
                        double sigma, double reference) {
  // x = y - sigma t
  Interval tdom{(y - c.domain.hi) / sigma, (y - c.domain.lo) / sigma};
  tdom = tdom.intersect(noise.support());
  Partial out;
  if (!(tdom.lo <= tdom.hi)) return out;

  const auto& log_px = c.log_pdf;
  auto logw = [&](double t) {
    const double lz = noise.log_pdf(t);
    if (lz == -kInf) return -kInf;
    return lz + log_px(y - sigma * t);
  };

  // Locate the peak of the weight.
  const double mode = std::clamp(noise.mode(), tdom.lo, tdom.hi);
  double t_star = mode;
  double top = logw(mode);
  auto consider = [&](double t) {
    t = std::clamp(t, tdom.lo, tdom.hi);
    const double v = logw(t);
    if (v > top) {
      top = v;
      t_star = t;
    }
  };
  consider(tdom.lo);
  consider(tdom.hi);
  for (double l : c.landmarks) consider((y - l) / sigma);
  {
    const double reach = std::isfinite(noise.window_half_width()) ? noise.window_half_width()
                                                                  : 50.0 * noise.scale();
    const double a = std::max(tdom.lo, noise.mode() - reach);
    const double b = std::min(tdom.hi, noise.mode() + reach);
    if (a < b) {
      for (int i = 0; i <= 64; ++i) consider(a + (b - a) * i / 64.0);
    }
    if (std::isfinite(tdom.width())) {
      for (int i = 1; i < 32; ++i) consider(tdom.lo + tdom.width() * i / 32.0);
    }
  }
  if (top == -kInf) return out;

  Interval win = tdom;
  const double k = noise.window_half_width();
  if (std::isfinite(k)) win = win.intersect({t_star - k, t_star + k});
  if (!(win.lo < win.hi)) return out;  // zero-measure overlap
  // Hopelessly below the floor even if the whole window carried the peak weight.
  if (std::isfinite(win.width()) &&
      top + std::log(win.width()) + std::log(sigma) < kLogFloor - 100.0) {
    return out;
  }

  std::vector<double> pts{win.lo, win.hi, t_star};
  if (win.contains_open(noise.mode())) pts.push_back(noise.mode());
  for (double kk : noise.kinks()) pts.push_back(kk);
  for (double l : c.landmarks) pts.push_back((y - l) / sigma);
  const double s = noise.scale();
  for (double step = 0.5 * s; step < win.width(); step *= 4.0) {
    pts.push_back(t_star - step);
    pts.push_back(t_star + step);
  }
  std::erase_if(pts, [&](double p) { return !(p >= win.lo && p <= win.hi); });
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  quad::Options opt;
  opt.rel_tol = 1e-12;
  const double yr = y - reference;
  auto run = [&](double shift, double centre, double& seen_max, double& seen_arg) {
    auto f = [&](double t) {
      const double l = logw(t);
      if (l > seen_max) {
        seen_max = l;
        seen_arg = t;
      }
      const double w = (l == -kInf) ? 0.0 : std::exp(l - shift);
      const double dt = t - centre;
      return quad::Vec<4>{w, w * (yr - sigma * t), w * dt, w * dt * dt};
    };
    return quad::integrate<4>(f, pts, opt);
  };

  double seen_max = top, seen_arg = t_star;
  auto r = run(top, t_star, seen_max, seen_arg);
  if (seen_max > top + 600.0 || !std::isfinite(r.value[0])) {
    const double shift = seen_max;
    const double centre = seen_arg;
    r = run(shift, centre, seen_max, seen_arg);
    top = shift;
    t_star = centre;
  }
  const double i0 = r.value[0];
  if (!(i0 > 0.0)) return out;
  out.log_norm = top + std::log(i0) + std::log(sigma);
  out.offset = r.value[1] / i0;
  const double m = r.value[2] / i0;
  out.variance = sigma * sigma * std::max(0.0, r.value[3] / i0 - m * m);
  return out;
}

Partial evaluate(double y, const PriorSpec& prior, const NoiseSpec& noise, double sigma,
                 double reference) {
  switch (prior.kind()) {
    case PriorSpec::Kind::Discrete:
      return discrete_part(y, prior.as_discrete(), noise, sigma, reference);
    case PriorSpec::Kind::Continuous:
      return continuous_part(y, prior.as_continuous(), noise, sigma, reference);
    case PriorSpec::Kind::Mixture: {
      const auto& m = prior.as_mixture();
      if (m.alpha == 1.0) return evaluate(y, *m.first, noise, sigma, reference);
      if (m.alpha == 0.0) return evaluate(y, *m.second, noise, sigma, reference);
      const Partial a = evaluate(y, *m.first, noise, sigma, reference);
      const Partial b = evaluate(y, *m.second, noise, sigma, reference);
      const double la = std::log(m.alpha) + a.log_norm;
      const double lb = std::log1p(-m.alpha) + b.log_norm;
      const double top = std::max(la, lb);
      Partial out;
      if (top == -kInf) return out;
      const double wa = std::exp(la - top);
      const double wb = std::exp(lb - top);
      const double pa = wa / (wa + wb);
      const double pb = wb / (wa + wb);
      out.log_norm = top + std::log(wa + wb);
      out.offset = pa * a.offset + pb * b.offset;
      const double d = a.offset - b.offset;
      out.variance = pa * a.variance + pb * b.variance + pa * pb * d * d;
      return out;
    }
  }
  return {};
}

void check_sigma(double sigma) {
  require(sigma > 0.0 && std::isfinite(sigma), ErrorKind::InvalidSigma, "sigma must be > 0");
}

}  // namespace

PosteriorMoments posterior_moments(double y, const PriorSpec& prior, const NoiseSpec& noise,
                                   double sigma, double reference) {
  check_sigma(sigma);
  require(std::isfinite(y), ErrorKind::InvalidArgument, "y must be finite");
  const Partial p = evaluate(y, prior, noise, sigma, reference);
  if (!(p.log_norm >= kLogFloor)) {
    throw Error(ErrorKind::UnderflowExhausted,
                "y = " + std::to_string(y) + " is unreachable (log-normalizer below -700)");
  }
  PosteriorMoments out;
  out.log_normalizer = p.log_norm;
  out.reference = reference;
  out.offset = p.offset;
  out.variance = p.variance;
  return out;
}

double posterior_mean(double y, const PriorSpec& prior, const NoiseSpec& noise, double sigma) {
  return posterior_moments(y, prior, noise, sigma, 0.0).mean();
}

double posterior_variance(double y, const PriorSpec& prior, const NoiseSpec& noise,
                          double sigma) {
  return posterior_moments(y, prior, noise, sigma, 0.0).variance;
}

double posterior_mean_z(double y, const PriorSpec& prior, const NoiseSpec& noise, double sigma) {
  return -posterior_moments(y, prior, noise, sigma, y).offset / sigma;
}

double normalized_error(double x, double z, const PriorSpec& prior, const NoiseSpec& noise,
                        double sigma) {
  return -posterior_moments(x + sigma * z, prior, noise, sigma, x).offset / sigma;
}

double posterior_mean_slope(double y, const PriorSpec& prior, const NoiseSpec& noise,
                            double sigma, std::optional<double> mean_hint) {
  const double m0 = mean_hint ? *mean_hint : posterior_mean(y, prior, noise, sigma);
  const Interval hull = prior.hull();
  double reference = m0;
  const double spread = hull.finite() ? std::max(hull.width(), 1e-300) : kInf;
  if (std::isfinite(hull.hi) && hull.hi - m0 < 0.25 * spread) {
    reference = hull.hi;
  } else if (std::isfinite(hull.lo) && m0 - hull.lo < 0.25 * spread) {
    reference = hull.lo;
  }
  const double h = std::max(1e-6, 1e-6 * std::abs(y));
  const double up = posterior_moments(y + h, prior, noise, sigma, reference).offset;
  const double dn = posterior_moments(y - h, prior, noise, sigma, reference).offset;
  return (up - dn) / (2.0 * h);
}

namespace {

Interval effective_span(const PriorSpec& prior) {
  switch (prior.kind()) {
    case PriorSpec::Kind::Discrete:
      return prior.hull();
    case PriorSpec::Kind::Continuous: {
      const auto& c = prior.as_continuous();
      if (c.support.finite()) return c.support;
      // Use +/- 8 standard deviations rather than the full quadrature domain.
      const double sd = std::sqrt(c.variance);
      return Interval{std::max(c.domain.lo, c.mean - 8.0 * sd),
                      std::min(c.domain.hi, c.mean + 8.0 * sd)};
    }
    case PriorSpec::Kind::Mixture: {
      const auto& m = prior.as_mixture();
      if (m.alpha == 1.0) return effective_span(*m.first);
      if (m.alpha == 0.0) return effective_span(*m.second);
      const Interval a = effective_span(*m.first);
      const Interval b = effective_span(*m.second);
      return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
    }
  }
  return {};
}

}  // namespace

Interval default_y_range(const PriorSpec& prior, const NoiseSpec& noise, double sigma) {
  check_sigma(sigma);
  const Interval span = effective_span(prior);
  const double pad = 6.0 * sigma * noise.scale();
  Interval out{span.lo - pad, span.hi + pad};
  // Bounded noise: stay inside the reachable set, just short of its ends.
  const Interval z = noise.support();
  if (std::isfinite(z.lo)) out.lo = std::max(out.lo, span.lo + sigma * z.lo * (1.0 - 1e-6));
  if (std::isfinite(z.hi)) out.hi = std::min(out.hi, span.hi + sigma * z.hi * (1.0 - 1e-6));
  return out;
}

PosteriorCurve::PosteriorCurve(PriorSpec prior, NoiseSpec noise, double sigma, Interval y_range,
                               std::size_t n_points)
    : prior_(std::move(prior)), noise_(std::move(noise)), sigma_(sigma) {
  check_sigma(sigma);
  require(n_points >= 64, ErrorKind::InvalidArgument, "curve needs at least 64 points");
  require(y_range.finite() && y_range.lo < y_range.hi, ErrorKind::InvalidArgument,
          "curve y-range must be a finite non-empty interval");

  grid_.reserve(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double y =
        y_range.lo + y_range.width() * static_cast<double>(i) / static_cast<double>(n_points - 1);
    grid_.push_back(query(y));
  }

  bool strictly_increasing = true;
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    const double d = grid_[i].mean - grid_[i - 1].mean;
    if (d < -1e-13) {
      certificate_ = Monotonicity::Failed;
      witness_ = Interval{grid_[i - 1].y, grid_[i].y};
      return;
    }
    if (!(d > 1e-13)) strictly_increasing = false;
  }
  if (noise_.is_gaussian()) {
    // sigma^2 dE[X|Y=y]/dy = Var(X|Y=y): positive variance means positive slope.
    const bool positive = std::all_of(grid_.begin(), grid_.end(),
                                      [](const CurvePoint& p) { return p.variance > 0.0; });
    certificate_ = positive ? Monotonicity::Strict : Monotonicity::Nondecreasing;
  } else {
    certificate_ = strictly_increasing ? Monotonicity::Strict : Monotonicity::Nondecreasing;
  }
}

CurvePoint PosteriorCurve::query(double y) const {
  const PosteriorMoments m = posterior_moments(y, prior_, noise_, sigma_, 0.0);
  return {y, m.mean(), m.variance};
}

PosteriorMoments PosteriorCurve::moments(double y, double reference) const {
  return posterior_moments(y, prior_, noise_, sigma_, reference);
}

double PosteriorCurve::slope(double y, std::optional<double> mean_hint) const {
  return posterior_mean_slope(y, prior_, noise_, sigma_, mean_hint);
}

PosteriorCurve build_curve(const PriorSpec& prior, const NoiseSpec& noise, double sigma,
                           std::optional<Interval> y_range, std::size_t n_points) {
  const Interval r = y_range ? *y_range : default_y_range(prior, noise, sigma);
  return PosteriorCurve(prior, noise, sigma, r, n_points);
}

}  // namespace esterr
