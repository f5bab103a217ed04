#include <gtest/gtest.h>

#include <cmath>

#include "esterr/dist_core.hpp"
#include "esterr/errors.hpp"
#include "esterr/posterior.hpp"
#include "esterr/scenarios.hpp"

using namespace esterr;

namespace {

const NoiseSpec kGauss = NoiseSpec::gaussian();

// Naive ratio of trapezoid sums, valid where nothing underflows.
struct Naive {
  double mean;
  double var;
  double mean_z;
};

Naive naive_continuous(double y, const PriorSpec& prior, const NoiseSpec& noise, double sigma,
                       double lo, double hi, int n = 400000) {
  const ContinuousPrior& c = prior.as_continuous();
  double s0 = 0, s1 = 0, s2 = 0, sz = 0;
  const double h = (hi - lo) / n;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * h;
    const double wgt = (i == 0 || i == n) ? 0.5 : 1.0;
    const double z = (y - x) / sigma;
    const double f = wgt * std::exp(c.log_pdf(x)) * noise.pdf(z);
    s0 += f;
    s1 += x * f;
    s2 += x * x * f;
    sz += z * f;
  }
  const double m = s1 / s0;
  return {m, s2 / s0 - m * m, sz / s0};
}

}  // namespace

TEST(PosteriorMean, GaussianConjugate) {
  EXPECT_NEAR(posterior_mean(2.0, PriorSpec::gaussian(0.0, 1.0), kGauss, 1.0), 1.0, 1e-10);
}

TEST(PosteriorMean, PointMass) {
  for (double y : {-10.0, 0.0, 3.5}) {
    EXPECT_DOUBLE_EQ(posterior_mean(y, PriorSpec::point_mass(1.7), NoiseSpec::laplace(), 0.3), 1.7);
  }
}

TEST(PosteriorMean, BinaryTanh) {
  EXPECT_NEAR(posterior_mean(0.5, PriorSpec::binary(0.5), kGauss, 1.0), 0.46211715726000974, 1e-12);
}

TEST(PosteriorMean, RejectsBadSigma) {
  EXPECT_THROW(posterior_mean(0.0, PriorSpec::binary(0.5), kGauss, 0.0), Error);
  EXPECT_THROW(posterior_mean(0.0, PriorSpec::binary(0.5), kGauss, -1.0), Error);
}

TEST(PosteriorMean, UnreachableYThrowsUnderflow) {
  // Uniform noise on (-1, 1) with X in {-1, 1}: y = 0 is reachable, y = 5 is not.
  EXPECT_NO_THROW(posterior_mean(0.0, PriorSpec::binary(0.5), NoiseSpec::uniform(), 1.5));
  try {
    posterior_mean(5.0, PriorSpec::binary(0.5), NoiseSpec::uniform(), 1.0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnderflowExhausted);
  }
}

TEST(PosteriorMean, StaysInHull) {
  for (const auto& [name, prior] : prior_registry()) {
    SCOPED_TRACE(name);
    const Interval hull = prior.hull();
    for (double sigma : {0.01, 0.3, 2.0}) {
      const Interval yr = default_y_range(prior, kGauss, sigma);
      for (int i = 0; i <= 20; ++i) {
        const double y = yr.lo + yr.width() * i / 20.0;
        double m = 0.0;
        try {
          m = posterior_mean(y, prior, kGauss, sigma);
        } catch (const Error& e) {
          // Gaps between atoms many sigma wide are unreachable.
          EXPECT_EQ(e.kind(), ErrorKind::UnderflowExhausted);
          continue;
        }
        EXPECT_GE(m, hull.lo);
        EXPECT_LE(m, hull.hi);
      }
    }
  }
}

TEST(PosteriorMean, SmallSigmaDoesNotUnderflow) {
  const PriorSpec b = PriorSpec::binary(0.5);
  // The weight of the atom at -1 is exp(-2e6), far below the double range.
  EXPECT_EQ(posterior_mean(0.999, b, kGauss, 1e-3), 1.0);
  EXPECT_NEAR(posterior_mean(2.5, PriorSpec::uniform(2.0, 3.0), kGauss, 1e-4), 2.5, 1e-10);
}

TEST(PosteriorVariance, GaussianConjugate) {
  const PriorSpec g = PriorSpec::gaussian(0.0, 1.0);
  for (double y : {-4.0, -1.0, 0.0, 0.3, 2.0, 7.0}) {
    EXPECT_NEAR(posterior_variance(y, g, kGauss, 1.0), 0.5, 1e-9);
  }
}

TEST(PosteriorVariance, PointMassAndBinary) {
  EXPECT_EQ(posterior_variance(0.4, PriorSpec::point_mass(2.0), kGauss, 1.0), 0.0);
  EXPECT_NEAR(posterior_variance(0.0, PriorSpec::binary(0.5), kGauss, 1.0), 1.0, 1e-14);
}

TEST(PosteriorMeanZ, Examples) {
  EXPECT_NEAR(posterior_mean_z(2.0, PriorSpec::gaussian(0.0, 1.0), kGauss, 1.0), 1.0, 1e-10);
  EXPECT_NEAR(posterior_mean_z(1.3, PriorSpec::point_mass(0.0), NoiseSpec::laplace(), 0.5), 2.6, 1e-14);
  EXPECT_NEAR(posterior_mean_z(0.0, PriorSpec::binary(0.5), kGauss, 1.0), 0.0, 1e-15);
}

TEST(Posterior, AgreesWithNaiveQuadrature) {
  struct Case {
    PriorSpec prior;
    NoiseSpec noise;
    double sigma;
    double lo, hi;
  };
  const std::vector<Case> cases{
      {PriorSpec::beta(2.0, 2.0), NoiseSpec::laplace(), 0.5, 0.0, 1.0},
      {PriorSpec::uniform(0.0, 1.0), NoiseSpec::student_t(3.0), 0.3, 0.0, 1.0},
      {PriorSpec::gaussian(0.5, 2.0), NoiseSpec::gaussian(), 0.7, -16.0, 17.0},
  };
  for (const auto& c : cases) {
    for (double y : {-0.5, 0.2, 0.8, 1.6}) {
      const Naive n = naive_continuous(y, c.prior, c.noise, c.sigma, c.lo, c.hi);
      EXPECT_NEAR(posterior_mean(y, c.prior, c.noise, c.sigma), n.mean, 1e-8);
      EXPECT_NEAR(posterior_variance(y, c.prior, c.noise, c.sigma), n.var, 1e-7);
      EXPECT_NEAR(posterior_mean_z(y, c.prior, c.noise, c.sigma), n.mean_z, 1e-7);
    }
  }
}

TEST(Posterior, DiscreteAgreesWithDirectSum) {
  const PriorSpec p = PriorSpec::discrete({{-1.0, 0.25}, {0.5, 0.5}, {2.0, 0.25}});
  const NoiseSpec noise = NoiseSpec::laplace();
  for (double y : {-2.0, 0.0, 0.7, 3.0}) {
    double s0 = 0, s1 = 0;
    for (const Atom& a : p.as_discrete().atoms) {
      const double f = a.mass * noise.pdf((y - a.location) / 0.8);
      s0 += f;
      s1 += a.location * f;
    }
    EXPECT_NEAR(posterior_mean(y, p, noise, 0.8), s1 / s0, 1e-13);
  }
}

TEST(Posterior, VarianceIdentityOnGrid) {
  for (const auto& [name, prior] : prior_registry()) {
    SCOPED_TRACE(name);
    const double sigma = 0.7;
    const PosteriorCurve curve = build_curve(prior, kGauss, sigma);
    for (std::size_t i = 0; i < curve.grid().size(); i += 8) {
      const CurvePoint& p = curve.grid()[i];
      const double lhs = sigma * sigma * curve.slope(p.y);
      EXPECT_NEAR(lhs / p.variance, 1.0, 1e-6) << "y = " << p.y;
    }
  }
}

TEST(Posterior, TowerProperty) {
  const PriorSpec prior = PriorSpec::beta(2.0, 2.0);
  const NoiseSpec noise = NoiseSpec::laplace();
  const double sigma = 0.4;
  const auto xs = sample(prior, 100000, 17);
  const auto zs = sample(noise, 100000, 18);
  double s = 0, s2 = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double m = posterior_mean(xs[i] + sigma * zs[i], prior, noise, sigma);
    s += m;
    s2 += m * m;
  }
  const double n = static_cast<double>(xs.size());
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  EXPECT_NEAR(mean, 0.5, 3.0 * se);
}

TEST(Curve, GaussianStrictWithConstantSlope) {
  const double sigma = 0.5;
  const PosteriorCurve c = build_curve(PriorSpec::gaussian(0.0, 1.0), kGauss, sigma);
  EXPECT_EQ(c.certificate(), Monotonicity::Strict);
  for (std::size_t i = 1; i < c.grid().size(); ++i) {
    const double slope = (c.grid()[i].mean - c.grid()[i - 1].mean) / (c.grid()[i].y - c.grid()[i - 1].y);
    EXPECT_NEAR(slope, 1.0 / (1.0 + sigma * sigma), 1e-9);
  }
}

TEST(Curve, PointMassIsFlat) {
  const PosteriorCurve c = build_curve(PriorSpec::point_mass(0.0), kGauss, 1.0);
  EXPECT_EQ(c.certificate(), Monotonicity::Nondecreasing);
}

TEST(Curve, BinaryStrict) {
  const PosteriorCurve c = build_curve(PriorSpec::binary(0.3), kGauss, 0.5);
  EXPECT_EQ(c.certificate(), Monotonicity::Strict);
  for (const CurvePoint& p : c.grid()) EXPECT_GE(p.variance, 0.0);
}

TEST(Curve, HeavyTailedNoiseIsNotMonotone) {
  // Student-t noise is not log-concave: an outlying observation is discounted.
  const PosteriorCurve c = build_curve(PriorSpec::binary(0.5), NoiseSpec::student_t(3.0), 0.3);
  EXPECT_EQ(c.certificate(), Monotonicity::Failed);
  ASSERT_TRUE(c.witness().has_value());
  EXPECT_LT(c.witness()->lo, c.witness()->hi);
}

TEST(Curve, ArgumentChecks) {
  EXPECT_THROW(PosteriorCurve(PriorSpec::binary(0.5), kGauss, 1.0, {-1.0, 1.0}, 10), Error);
  EXPECT_THROW(PosteriorCurve(PriorSpec::binary(0.5), kGauss, 1.0, {1.0, -1.0}, 100), Error);
}

TEST(Curve, DefaultRangeCoversInflatedHull) {
  const Interval r = default_y_range(PriorSpec::binary(0.5), kGauss, 0.5);
  EXPECT_LE(r.lo, -1.0 - 3.0);
  EXPECT_GE(r.hi, 1.0 + 3.0);
}
