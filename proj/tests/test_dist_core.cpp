#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "esterr/convergence.hpp"
#include "esterr/dist_core.hpp"
#include "esterr/errors.hpp"
#include "esterr/quadrature.hpp"

using namespace esterr;

namespace {

double sample_mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

// Composite Simpson on a fine even grid; independent of the library quadrature.
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST(LogConcavity, GaussianIsStrict) {
  EXPECT_EQ(check_strict_log_concavity(NoiseSpec::gaussian()), Concavity::True);
}

TEST(LogConcavity, LaplaceIsNotStrict) {
  EXPECT_EQ(check_strict_log_concavity(NoiseSpec::laplace()), Concavity::False);
}

TEST(LogConcavity, UniformIsNotStrict) {
  EXPECT_EQ(check_strict_log_concavity(NoiseSpec::uniform()), Concavity::False);
}

TEST(LogConcavity, RejectsCoarseGrid) {
  EXPECT_THROW(check_strict_log_concavity(NoiseSpec::gaussian(), 8), Error);
}

TEST(Noise, InvalidParametersThrow) {
  EXPECT_THROW(NoiseSpec::gaussian(0.0, 0.0), Error);
  EXPECT_THROW(NoiseSpec::uniform(1.0, 1.0), Error);
  EXPECT_THROW(NoiseSpec::student_t(-1.0), Error);
}

TEST(Noise, DensitiesIntegrateToOneAndMatchMoments) {
  for (const auto& [name, noise] : noise_registry()) {
    SCOPED_TRACE(name);
    const Interval s = noise.support();
    // Heavy tails: integrate on a wide window and account for the analytic tail mass.
    const double lo = std::isfinite(s.lo) ? s.lo : -2000.0;
    const double hi = std::isfinite(s.hi) ? s.hi : 2000.0;
    const double mass = simpson([&](double z) { return noise.pdf(z); }, lo, hi, 4000000);
    const double tol = noise.tail_exponent() < 10.0 ? 1e-3 : 1e-8;
    EXPECT_NEAR(mass, 1.0, tol);
    if (std::isfinite(noise.variance()) && noise.tail_exponent() > 10.0) {
      const double m = simpson([&](double z) { return z * noise.pdf(z); }, lo, hi, 4000000);
      const double v =
          simpson([&](double z) { return (z - m) * (z - m) * noise.pdf(z); }, lo, hi, 4000000);
      EXPECT_NEAR(m, noise.mean(), 1e-6);
      EXPECT_NEAR(v / noise.variance(), 1.0, 1e-6);
    }
  }
}

TEST(Noise, LogPdfMatchesPdf) {
  for (const auto& [name, noise] : noise_registry()) {
    SCOPED_TRACE(name);
    for (double z : {-3.0, -0.7, 0.0, 0.4, 0.99, 5.0}) {
      const double f = noise.pdf(z);
      if (f > 0.0) {
        EXPECT_NEAR(noise.log_pdf(z), std::log(f), 1e-12 * std::max(1.0, std::abs(std::log(f))));
      } else {
        EXPECT_EQ(noise.log_pdf(z), -kInf);
      }
    }
  }
}

TEST(Noise, TailConstantBoundsScaledDensity) {
  for (const auto& [name, noise] : noise_registry()) {
    const double a = noise.tail_exponent();
    if (!std::isfinite(a)) continue;
    SCOPED_TRACE(name);
    for (double z = 10.0; z <= 1000.0; z *= 1.1) {
      EXPECT_LE(std::pow(z, a) * noise.pdf(z), noise.tail_constant() * (1.0 + 1e-9));
      EXPECT_LE(std::pow(z, a) * noise.pdf(-z), noise.tail_constant() * (1.0 + 1e-9));
    }
  }
}

TEST(Noise, DivergentVarianceRejected) {
  EXPECT_THROW(moments(NoiseSpec::student_t(1.0)), Error);
  EXPECT_THROW(moments(NoiseSpec::student_t(2.5)), Error);
  const Moments m = moments(NoiseSpec::student_t(5.0));
  EXPECT_NEAR(m.variance, 5.0 / 3.0, 1e-12);
}

TEST(Prior, DiscreteValidation) {
  EXPECT_THROW(PriorSpec::discrete({{0.0, 0.5}, {1.0, 0.4}}), Error);
  EXPECT_THROW(PriorSpec::discrete({{1.0, 0.5}, {1.0, 0.5}}), Error);
  // Atoms are stored in increasing order whatever the input order.
  const PriorSpec p = PriorSpec::discrete({{1.0, 0.25}, {0.0, 0.75}});
  const auto& atoms = p.as_discrete().atoms;
  EXPECT_EQ(atoms[0].location, 0.0);
  EXPECT_EQ(atoms[1].mass, 0.25);
  EXPECT_THROW(PriorSpec::discrete({{0.0, 1.0}, {1.0, 0.0}}), Error);
  EXPECT_NO_THROW(PriorSpec::discrete({{0.0, 0.5}, {1.0, 0.5}}));
}

TEST(Prior, ContinuousNormalizationChecked) {
  auto bad = [] {
    return PriorSpec::continuous(
        "half", [](double) { return std::log(0.5); }, {0.0, 1.0}, {0.0, 1.0}, true, true);
  };
  EXPECT_THROW(bad(), Error);
  auto good = [] {
    return PriorSpec::continuous(
        "unit", [](double) { return 0.0; }, {0.0, 1.0}, {0.0, 1.0}, true, true);
  };
  EXPECT_NO_THROW(good());
}

TEST(Prior, MixtureWeightRange) {
  EXPECT_THROW(PriorSpec::mixture(PriorSpec::point_mass(0.0), PriorSpec::uniform(2, 3), 1.5), Error);
  EXPECT_THROW(PriorSpec::mixture(PriorSpec::point_mass(0.0), PriorSpec::uniform(2, 3), -0.1), Error);
}

TEST(Prior, ContinuousDensitiesIntegrateToOne) {
  for (const auto& [name, prior] : prior_registry()) {
    if (prior.kind() != PriorSpec::Kind::Continuous) continue;
    SCOPED_TRACE(name);
    const ContinuousPrior& c = prior.as_continuous();
    const double mass = simpson([&](double x) { return std::exp(c.log_pdf(x)); }, c.domain.lo,
                                  c.domain.hi, 2000000);
    EXPECT_NEAR(mass, 1.0, 1e-8);
  }
}

TEST(Sample, DiscreteDrawsStayOnAtoms) {
  const auto v = sample(PriorSpec::discrete({{-1.0, 0.5}, {1.0, 0.5}}), 4, 7);
  ASSERT_EQ(v.size(), 4u);
  for (double x : v) EXPECT_TRUE(x == -1.0 || x == 1.0);
}

TEST(Sample, GaussianMomentsAtOneMillion) {
  const auto v = sample(PriorSpec::gaussian(0.0, 1.0), 1000000, 1);
  EXPECT_NEAR(sample_mean(v), 0.0, 5e-3);
  const double var = sample_variance(v);
  EXPECT_GE(var, 0.995);
  EXPECT_LE(var, 1.005);
}

TEST(Sample, NoiseGaussianMean) {
  const auto v = sample(NoiseSpec::gaussian(), 1000000, 3);
  EXPECT_NEAR(sample_mean(v), 0.0, 5e-3);
}

TEST(Sample, DegenerateMixtureUsesFirstComponent) {
  const PriorSpec mix = PriorSpec::mixture(PriorSpec::point_mass(0.0), PriorSpec::uniform(2.0, 3.0), 1.0);
  for (double x : sample(mix, 1000, 11)) EXPECT_EQ(x, 0.0);
}

TEST(Sample, ReproducibleStreams) {
  const PriorSpec p = PriorSpec::beta(2.0, 2.0);
  EXPECT_EQ(sample(p, 1000, 42), sample(p, 1000, 42));
  EXPECT_NE(sample(p, 1000, 42), sample(p, 1000, 43));
  EXPECT_EQ(sample(NoiseSpec::laplace(), 100, 5), sample(NoiseSpec::laplace(), 100, 5));
}

TEST(Moments, BinaryHandSum) {
  const Moments m = moments(PriorSpec::binary(0.3));
  EXPECT_NEAR(m.mean, -0.4, 1e-12);
  EXPECT_NEAR(m.variance, 0.84, 1e-12);
}

TEST(Moments, StandardGaussian) {
  const Moments m = moments(PriorSpec::gaussian(0.0, 1.0));
  EXPECT_NEAR(m.mean, 0.0, 1e-8);
  EXPECT_NEAR(m.variance, 1.0, 1e-8);
  const Moments z = moments(NoiseSpec::gaussian());
  EXPECT_NEAR(z.mean, 0.0, 1e-12);
  EXPECT_NEAR(z.variance, 1.0, 1e-12);
}

TEST(Moments, AtomUniformMixture) {
  const PriorSpec mix = PriorSpec::mixture(PriorSpec::point_mass(0.0), PriorSpec::uniform(0.0, 1.0), 0.5);
  const Moments m = moments(mix);
  EXPECT_NEAR(m.mean, 0.25, 1e-8);
  // E[X^2] = 0.5 / 3, so Var = 1/6 - 1/16.
  EXPECT_NEAR(m.variance, 1.0 / 6.0 - 1.0 / 16.0, 1e-8);
}

TEST(Moments, BetaClosedForm) {
  const Moments m = moments(PriorSpec::beta(2.0, 2.0));
  EXPECT_NEAR(m.mean, 0.5, 1e-8);
  EXPECT_NEAR(m.variance, 0.05, 1e-8);
}

TEST(Path, LabelOnlyForMixtures) {
  const RealizationPath a = draw_path(PriorSpec::binary(0.5), NoiseSpec::gaussian(), 3);
  EXPECT_FALSE(a.u.has_value());
  EXPECT_TRUE(a.x == -1.0 || a.x == 1.0);
  const PriorSpec mix =
      PriorSpec::mixture(PriorSpec::point_mass(0.0), PriorSpec::uniform(2.0, 3.0), 0.5);
  int first = 0;
  for (std::uint64_t s = 1; s <= 200; ++s) {
    const RealizationPath p = draw_path(mix, NoiseSpec::gaussian(), s);
    ASSERT_TRUE(p.u.has_value());
    if (*p.u == 1) {
      ++first;
      EXPECT_EQ(p.x, 0.0);
    } else {
      EXPECT_EQ(*p.u, 2);
      EXPECT_GE(p.x, 2.0);
      EXPECT_LE(p.x, 3.0);
    }
    EXPECT_EQ(p.seed, s);
  }
  EXPECT_GT(first, 60);
  EXPECT_LT(first, 140);
}

TEST(Path, Deterministic) {
  const PriorSpec p = PriorSpec::beta(2.0, 2.0);
  const RealizationPath a = draw_path(p, NoiseSpec::laplace(), 9);
  const RealizationPath b = draw_path(p, NoiseSpec::laplace(), 9);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.z, b.z);
}

TEST(Registry, FlagsAndDescriptions) {
  for (const auto& [name, noise] : noise_registry()) {
    EXPECT_FALSE(noise.describe().empty());
  }
  const NoiseSpec g = NoiseSpec::gaussian();
  EXPECT_TRUE(g.flags().strictly_log_concave);
  EXPECT_TRUE(g.flags().doob);
  EXPECT_EQ(g.tail_exponent(), kInf);
  EXPECT_FALSE(NoiseSpec::laplace().flags().strictly_log_concave);
  EXPECT_FALSE(NoiseSpec::student_t(1.0).flags().in_l1);
}
