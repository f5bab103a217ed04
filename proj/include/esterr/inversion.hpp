#pragma once

// Functional inverse of the posterior-mean curve y -> E[X | Y = y].

#include "esterr/posterior.hpp"

namespace esterr {

/// Open range (lim_{y->-inf} E[X|Y=y], lim_{y->+inf} E[X|Y=y]) with +/-inf
/// sentinels for unbounded ends. A flat curve gives an empty interval.
Interval range_of(const PosteriorCurve& curve);

struct InversePoint {
  double y = 0.0;
  /// d/dx of the inverse at x.
  double derivative = 0.0;
};

class InverseMap {
 public:
  /// Throws NonInvertible unless the curve's certificate is Strict.
  explicit InverseMap(PosteriorCurve curve);

  const PosteriorCurve& curve() const { return curve_; }
  Interval range() const { return range_; }
  /// Range shrunk by 1e-6 of its spread at each finite end.
  Interval guarded_range() const { return guarded_; }

  /// y with E[X | Y = y] = x. Throws OutOfRange for x outside range().
  double query(double x) const;
  /// y with E[X - reference | Y = y] = delta. Resolves targets closer to
  /// `reference` than its rounding granularity (e.g. next to a range end).
  double query_offset(double reference, double delta) const;
  /// 1 / slope of the curve at query(x); throws SlopeUnderflow when the slope is below 1e-13.
  double derivative(double x) const;
  /// sigma^2 Var(Z) / Var(X | Y = query(x)); Gaussian noise only.
  double derivative_from_variance(double x) const;

  InversePoint solve(double x) const;
  InversePoint solve_offset(double reference, double delta) const;
  InversePoint solve_with_variance(double x) const;

 private:
  PosteriorCurve curve_;
  Interval range_;
  Interval guarded_;
};

double invert(const InverseMap& map, double x);
double inverse_derivative(const InverseMap& map, double x);

}  // namespace esterr
