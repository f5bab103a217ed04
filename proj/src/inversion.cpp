#include "esterr/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "esterr/errors.hpp"

namespace esterr {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Limit of the mean as y runs off one end of the grid (direction = +1 or -1).
double tail_limit(const PosteriorCurve& curve, int direction) {
  const auto& g = curve.grid();
  const double span = g.back().y - g.front().y;
  const CurvePoint& edge = direction > 0 ? g.back() : g.front();
  const Interval hull = curve.prior().hull();
  const double bound = direction > 0 ? hull.hi : hull.lo;

  double previous = edge.mean;
  for (int k = 0; k <= 60; ++k) {
    const double y = edge.y + direction * span * std::ldexp(1.0, k);
    double m = 0.0;
    try {
      m = curve.query(y).mean;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UnderflowExhausted) throw;
      break;
    }
    if (std::abs(m - previous) < 1e-10) {
      if (std::isfinite(bound) && std::abs(m - bound) < 1e-8) return bound;
      return m;
    }
    previous = m;
  }
  // Still moving when y became unreachable: the mean tends to the hull end.
  return bound;
}

}  // namespace

Interval range_of(const PosteriorCurve& curve) {
  if (curve.certificate() == Monotonicity::Failed) return {0.0, 0.0};
  const double lo = tail_limit(curve, -1);
  const double hi = tail_limit(curve, +1);
  if (!(lo < hi)) return {lo, lo};
  return {lo, hi};
}

InverseMap::InverseMap(PosteriorCurve curve) : curve_(std::move(curve)) {
  if (curve_.certificate() != Monotonicity::Strict) {
    throw Error(ErrorKind::NonInvertible, "posterior-mean curve is not strictly increasing");
  }
  range_ = range_of(curve_);
  require(!range_.empty(), ErrorKind::NonInvertible, "posterior-mean curve has an empty range");
  const double spread = range_.finite() ? range_.width() : 1.0;
  guarded_ = range_;
  if (std::isfinite(guarded_.lo)) guarded_.lo += 1e-6 * spread;
  if (std::isfinite(guarded_.hi)) guarded_.hi -= 1e-6 * spread;
}

double InverseMap::query(double x) const { return query_offset(x, 0.0); }

double InverseMap::query_offset(double reference, double delta) const {
  const double x = reference + delta;
  if (!(delta > range_.lo - reference && delta < range_.hi - reference)) {
    throw Error(ErrorKind::OutOfRange, "x = " + std::to_string(x) + " outside the estimator range");
  }
  // f(y) = E[X - x | Y = y] is increasing in y; for Gaussian noise its slope is
  // Var(X | Y = y) / (sigma^2 Var(Z)), which drives Newton steps.
  const bool newton = curve_.noise().is_gaussian();
  const double noise_var = curve_.sigma() * curve_.sigma() * curve_.noise().variance();
  double last_slope = 0.0;
  auto f = [&](double y) {
    try {
      const PosteriorMoments m = curve_.moments(y, reference);
      last_slope = m.variance / noise_var;
      return m.offset - delta;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::UnderflowExhausted) {
        throw Error(ErrorKind::OutOfRange, "x = " + std::to_string(x) + " needs an unreachable y");
      }
      throw;
    }
  };

  const auto& g = curve_.grid();
  auto it = std::upper_bound(g.begin(), g.end(), x,
                             [](double v, const CurvePoint& p) { return v < p.mean; });
  const double span = g.back().y - g.front().y;
  double a, b, guess;
  if (it == g.begin()) {
    b = g.front().y;
    a = b - span;
    guess = b;
  } else if (it == g.end()) {
    a = g.back().y;
    b = a + span;
    guess = a;
  } else {
    const CurvePoint& lo = *std::prev(it);
    const CurvePoint& hi = *it;
    a = lo.y;
    b = hi.y;
    const double d = hi.mean - lo.mean;
    guess = d > 0.0 ? lo.y + (x - lo.mean) / d * (hi.y - lo.y) : 0.5 * (lo.y + hi.y);
  }
  // Residual scale: |delta| when the target sits very close to the reference.
  const double scale =
      delta == 0.0 ? std::max(1.0, std::abs(x)) : std::min(std::max(1.0, std::abs(x)), std::abs(delta));
  const double ftol = 1e-15 * scale;

  // Newton from the interpolated guess, kept inside the grid cell.
  if (newton) {
    double y = guess;
    for (int iter = 0; iter < 8; ++iter) {
      const double fy = f(y);
      if (std::abs(fy) <= ftol) return y;
      if (fy < 0.0) {
        a = std::max(a, y);
      } else {
        b = std::min(b, y);
      }
      if (!(last_slope > 0.0)) break;
      const double next = y - fy / last_slope;
      if (!(next > a && next < b) || next == y) break;
      // Quadratic convergence: the next residual is far below the tolerance.
      if (std::abs(fy) <= 1e-9 * scale && std::abs(next - y) <= 1e-9 * std::max(1.0, std::abs(y))) {
        return next;
      }
      y = next;
    }
  }

  double fa = f(a);
  double fb = f(b);
  for (int k = 0; fa > 0.0 && k < 60; ++k) {
    b = a;
    fb = fa;
    a -= span * std::ldexp(1.0, k);
    fa = f(a);
  }
  for (int k = 0; fb < 0.0 && k < 60; ++k) {
    a = b;
    fa = fb;
    b += span * std::ldexp(1.0, k);
    fb = f(b);
  }
  if (fa > 0.0 || fb < 0.0) {
    throw Error(ErrorKind::OutOfRange, "no bracket for x = " + std::to_string(x));
  }
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;

  // Illinois regula falsi with a bisection fallback when the bracket stalls.
  int side = 0;
  double width_before = b - a;
  for (int iter = 0; iter < 200; ++iter) {
    if (b - a <= 4.0 * kEps * std::max({1.0, std::abs(a), std::abs(b)})) break;
    double c = b - fb * (b - a) / (fb - fa);
    if (iter % 3 == 2) {
      if (b - a > 0.5 * width_before) c = 0.5 * (a + b);
      width_before = b - a;
    }
    if (!(c > a && c < b)) c = 0.5 * (a + b);
    const double fc = f(c);
    if (std::abs(fc) <= ftol) return c;
    if (fc < 0.0) {
      a = c;
      fa = fc;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      b = c;
      fb = fc;
      if (side == +1) fa *= 0.5;
      side = +1;
    }
  }
  return (std::abs(fa) < std::abs(fb)) ? a : b;
}

InversePoint InverseMap::solve(double x) const { return solve_offset(x, 0.0); }

InversePoint InverseMap::solve_offset(double reference, double delta) const {
  InversePoint p;
  p.y = query_offset(reference, delta);
  const double s = curve_.slope(p.y, reference + delta);
  if (!(s >= 1e-13)) {
    throw Error(ErrorKind::SlopeUnderflow, "curve slope below 1e-13 at y = " + std::to_string(p.y));
  }
  p.derivative = 1.0 / s;
  return p;
}

InversePoint InverseMap::solve_with_variance(double x) const {
  if (!curve_.noise().is_gaussian()) {
    throw Error(ErrorKind::UnsupportedMode, "variance form of the inverse derivative needs Gaussian noise");
  }
  InversePoint p;
  p.y = query(x);
  const double v = curve_.moments(p.y, 0.0).variance;
  const double noise_var = curve_.sigma() * curve_.sigma() * curve_.noise().variance();
  if (!(v > 0.0) || v < 1e-13 * noise_var) {
    throw Error(ErrorKind::SlopeUnderflow, "posterior variance vanishes at y = " + std::to_string(p.y));
  }
  p.derivative = noise_var / v;
  return p;
}

double InverseMap::derivative(double x) const { return solve(x).derivative; }

double InverseMap::derivative_from_variance(double x) const {
  return solve_with_variance(x).derivative;
}

double invert(const InverseMap& map, double x) { return map.query(x); }

double inverse_derivative(const InverseMap& map, double x) { return map.derivative(x); }

}  // namespace esterr
