#pragma once

// Adaptive Gauss-Kronrod (G10/K21) integration of vector-valued integrands.
//
// Error estimation follows QUADPACK's dqk21. Breakpoints seed the initial
// partition; the segment with the largest error relative to its component
// tolerance is bisected until every component meets
//   err_k <= max(abs_tol, rel_tol * integral_k |f_k|).
// Infinite endpoints are mapped onto a finite interval first.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace esterr::quad {

struct Options {
  double rel_tol = 1e-12;
  double abs_tol = 1e-300;
  int max_segments = 4000;
};

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
struct Result {
  Vec<N> value{};
  Vec<N> error{};
  Vec<N> abs_value{};
  int evaluations = 0;
  bool converged = true;
};

namespace detail {

inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <std::size_t N>
struct Segment {
  double a = 0.0;
  double b = 0.0;
  Vec<N> value{};
  Vec<N> error{};
  Vec<N> abs_value{};
  bool splittable = true;
};

template <std::size_t N, class F>
Segment<N> gk21(F& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  std::array<Vec<N>, 21> fv;
  fv[0] = f(centre);
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    fv[1 + 2 * j] = f(centre - dx);
    fv[2 + 2 * j] = f(centre + dx);
  }

  Segment<N> seg;
  seg.a = a;
  seg.b = b;
  for (std::size_t k = 0; k < N; ++k) {
    double resk = kWgk[10] * fv[0][k];
    double resabs = std::abs(resk);
    double resg = 0.0;
    for (std::size_t j = 0; j < 10; ++j) {
      const double lo = fv[1 + 2 * j][k];
      const double hi = fv[2 + 2 * j][k];
      resk += kWgk[j] * (lo + hi);
      resabs += kWgk[j] * (std::abs(lo) + std::abs(hi));
      // Gauss nodes are the odd-indexed Kronrod abscissae.
      if (j % 2 == 1) resg += kWg[j / 2] * (lo + hi);
    }
    const double reskh = 0.5 * resk;
    double resasc = kWgk[10] * std::abs(fv[0][k] - reskh);
    for (std::size_t j = 0; j < 10; ++j) {
      resasc += kWgk[j] * (std::abs(fv[1 + 2 * j][k] - reskh) +
                           std::abs(fv[2 + 2 * j][k] - reskh));
    }
    const double dhalf = std::abs(half);
    double err = std::abs((resk - resg) * half);
    resasc *= dhalf;
    resabs *= dhalf;
    if (resasc != 0.0 && err != 0.0) {
      err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    if (resabs > uflow / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    seg.value[k] = resk * half;
    seg.error[k] = err;
    seg.abs_value[k] = resabs;
  }
  const double width_floor = 4.0 * eps * std::max({std::abs(a), std::abs(b), uflow});
  seg.splittable = (b - a) > width_floor;
  return seg;
}

// Integrates f over a sorted list of finite breakpoints (first/last are the limits).
template <std::size_t N, class F>
Result<N> integrate_finite(F& f, std::span<const double> points, const Options& opt) {
  std::vector<Segment<N>> segs;
  segs.reserve(points.size() + 16);
  Result<N> out;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i + 1] > points[i])) continue;
    segs.push_back(gk21<N>(f, points[i], points[i + 1]));
    out.evaluations += 21;
  }

  auto totals = [&]() {
    Vec<N> v{}, e{}, ab{};
    for (const auto& s : segs) {
      for (std::size_t k = 0; k < N; ++k) {
        v[k] += s.value[k];
        e[k] += s.error[k];
        ab[k] += s.abs_value[k];
      }
    }
    out.value = v;
    out.error = e;
    out.abs_value = ab;
  };

  totals();
  while (true) {
    Vec<N> tol{};
    bool done = true;
    for (std::size_t k = 0; k < N; ++k) {
      tol[k] = std::max(opt.abs_tol, opt.rel_tol * out.abs_value[k]);
      if (out.error[k] > tol[k]) done = false;
    }
    if (done) break;
    if (static_cast<int>(segs.size()) >= opt.max_segments) {
      out.converged = false;
      break;
    }
    std::size_t worst = segs.size();
    double worst_score = 0.0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      if (!segs[i].splittable) continue;
      double score = 0.0;
      for (std::size_t k = 0; k < N; ++k) score = std::max(score, segs[i].error[k] / tol[k]);
      if (score > worst_score) {
        worst_score = score;
        worst = i;
      }
    }
    if (worst == segs.size()) {
      out.converged = false;
      break;
    }
    const double a = segs[worst].a;
    const double b = segs[worst].b;
    const double mid = 0.5 * (a + b);
    segs[worst] = gk21<N>(f, a, mid);
    segs.push_back(gk21<N>(f, mid, b));
    out.evaluations += 42;
    totals();
  }
  return out;
}

}  // namespace detail

/// Integrates a vector-valued f over [points.front(), points.back()], using the
/// interior points as initial breakpoints. Either limit may be infinite.
template <std::size_t N, class F>
Result<N> integrate(F&& f, std::span<const double> points, const Options& opt = {}) {
  if (points.size() < 2) return {};
  const double a = points.front();
  const double b = points.back();
  if (std::isfinite(a) && std::isfinite(b)) return detail::integrate_finite<N>(f, points, opt);

  // Map to t in a finite interval. Breakpoints are carried through the inverse map.
  std::vector<double> tpoints;
  tpoints.reserve(points.size());
  if (!std::isfinite(a) && !std::isfinite(b)) {
    // x = t / (1 - t^2), t in (-1, 1)
    auto to_t = [](double x) {
      if (std::isinf(x)) return x > 0 ? 1.0 : -1.0;
      if (x == 0.0) return 0.0;
      return 2.0 * x / (1.0 + std::sqrt(1.0 + 4.0 * x * x));
    };
    for (double p : points) tpoints.push_back(to_t(p));
    auto g = [&f](double t) {
      const double d = 1.0 - t * t;
      Vec<N> v = f(t / d);
      const double jac = (1.0 + t * t) / (d * d);
      for (auto& c : v) c = (c == 0.0) ? 0.0 : c * jac;
      return v;
    };
    return detail::integrate_finite<N>(g, tpoints, opt);
  }
  if (std::isfinite(a)) {
    // x = a + t / (1 - t), t in [0, 1)
    for (double p : points) tpoints.push_back(std::isinf(p) ? 1.0 : (p - a) / (1.0 + (p - a)));
    auto g = [&f, a](double t) {
      const double d = 1.0 - t;
      Vec<N> v = f(a + t / d);
      const double jac = 1.0 / (d * d);
      for (auto& c : v) c = (c == 0.0) ? 0.0 : c * jac;
      return v;
    };
    return detail::integrate_finite<N>(g, tpoints, opt);
  }
  // (-inf, b]: x = b - (1 - t) / t, t in (0, 1]
  for (double p : points) tpoints.push_back(std::isinf(p) ? 0.0 : 1.0 / (1.0 + (b - p)));
  auto g = [&f, b](double t) {
    Vec<N> v = f(b - (1.0 - t) / t);
    const double jac = 1.0 / (t * t);
    for (auto& c : v) c = (c == 0.0) ? 0.0 : c * jac;
    return v;
  };
  return detail::integrate_finite<N>(g, tpoints, opt);
}

/// Scalar convenience wrapper.
template <class F>
double integrate_scalar(F&& f, std::span<const double> points, const Options& opt = {},
                        double* error = nullptr) {
  auto g = [&f](double x) { return Vec<1>{f(x)}; };
  auto r = integrate<1>(g, points, opt);
  if (error != nullptr) *error = r.error[0];
  return r.value[0];
}

template <class F>
double integrate_scalar(F&& f, double a, double b, const Options& opt = {},
                        double* error = nullptr) {
  const std::array<double, 2> pts{a, b};
  return integrate_scalar(f, std::span<const double>(pts), opt, error);
}

}  // namespace esterr::quad
