#include <gtest/gtest.h>

#include <cmath>

#include "esterr/convergence.hpp"
#include "esterr/scenarios.hpp"

using namespace esterr;

namespace {

const NoiseSpec kGauss = NoiseSpec::gaussian();

RealizationPath path(double x, double z, std::optional<int> u = std::nullopt) {
  RealizationPath p;
  p.x = x;
  p.z = z;
  p.u = u;
  return p;
}

}  // namespace

TEST(SigmaGrid, GeometricAndDecreasing) {
  const auto g = geometric_sigma_grid();
  ASSERT_EQ(g.size(), 40u);
  EXPECT_EQ(g.front(), 1.0);
  EXPECT_NEAR(g.back(), 1e-3, 1e-18);
  for (std::size_t i = 1; i < g.size(); ++i) {
    EXPECT_LT(g[i], g[i - 1]);
    EXPECT_NEAR(g[i] / g[i - 1], g[1] / g[0], 1e-12);
  }
  EXPECT_THROW(geometric_sigma_grid(1e-3, 1.0, 10), Error);
  EXPECT_THROW(geometric_sigma_grid(1.0, 0.1, 1), Error);
}

TEST(Classify, LimitRows) {
  EXPECT_EQ(classify_limit_row(PriorSpec::binary(0.5), kGauss), LimitRow::Discrete);
  EXPECT_EQ(classify_limit_row(PriorSpec::beta(2.0, 2.0), NoiseSpec::laplace()),
            LimitRow::BoundedContinuous);
  EXPECT_EQ(classify_limit_row(PriorSpec::uniform(0.0, 1.0), NoiseSpec::student_t(3.0)),
            LimitRow::PowerTailContinuous);
  EXPECT_EQ(classify_limit_row(registry_prior("mix_atom_uniform"), kGauss), LimitRow::Mixture);
  EXPECT_EQ(classify_limit_row(registry_prior("mix_atom_uniform"), NoiseSpec::student_t(1.0)),
            LimitRow::None);
  for (const auto& s : limit_scenarios()) EXPECT_EQ(classify_limit_row(s.prior, s.noise), s.row);
}

TEST(Sweep, DiscreteLimitIsZero) {
  const SweepReport r =
      pathwise_sweep(path(1.0, 0.7), PriorSpec::binary(0.5), kGauss, geometric_sigma_grid());
  EXPECT_EQ(r.row, LimitRow::Discrete);
  EXPECT_EQ(r.predicted_limit, 0.0);
  EXPECT_TRUE(r.all_evaluated());
  EXPECT_LT(r.terminal_deviation, 1e-6);
  EXPECT_TRUE(r.tail_nonincreasing());
}

TEST(Sweep, GaussianGaussianIsExact) {
  const RealizationPath p = path(0.3, -1.1);
  const auto grid = geometric_sigma_grid();
  const SweepReport r = pathwise_sweep(p, PriorSpec::gaussian(0.0, 1.0), kGauss, grid);
  EXPECT_EQ(r.row, LimitRow::BoundedContinuous);
  EXPECT_NEAR(r.predicted_limit, 1.1, 1e-15);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = grid[i];
    EXPECT_NEAR(r.e_values[i], (s * p.x - p.z) / (1.0 + s * s), 1e-9) << "sigma = " << s;
  }
  EXPECT_NEAR(r.e_values.back(), (1e-3 * 0.3 + 1.1) / (1.0 + 1e-6), 1e-9);
  EXPECT_NEAR(r.terminal_deviation, 1e-3 * 0.3, 2e-6);
}

TEST(Sweep, MixtureContinuousComponent) {
  const PriorSpec mix = registry_prior("mix_atom_uniform");
  const auto label = continuous_label(mix);
  ASSERT_TRUE(label.has_value());
  const RealizationPath p = path(2.4, 0.8, *label);
  const SweepReport r = pathwise_sweep(p, mix, kGauss, geometric_sigma_grid());
  EXPECT_EQ(r.row, LimitRow::Mixture);
  EXPECT_NEAR(r.predicted_limit, -0.8, 1e-15);
  EXPECT_LT(r.terminal_deviation, 10.0 * 1e-3 * (1.0 + std::abs(p.x)));
}

TEST(Sweep, MixtureAtomComponent) {
  const PriorSpec mix = registry_prior("mix_atom_uniform");
  const int atom = 3 - *continuous_label(mix);
  const SweepReport r = pathwise_sweep(path(0.0, 0.8, atom), mix, kGauss, geometric_sigma_grid());
  EXPECT_EQ(r.predicted_limit, 0.0);
  EXPECT_LT(r.terminal_deviation, 1e-6);
}

TEST(Sweep, NoPredictionCarriesValues) {
  const auto grid = geometric_sigma_grid(1.0, 0.1, 5);
  try {
    pathwise_sweep(path(2.5, 0.3, 2), registry_prior("mix_atom_uniform"), NoiseSpec::student_t(1.0),
                   grid);
    FAIL();
  } catch (const NoPredictionError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoPrediction);
    EXPECT_EQ(e.report().e_values.size(), grid.size());
    EXPECT_TRUE(std::isnan(e.report().predicted_limit));
  }
}

TEST(Sweep, SecondMomentTrack) {
  const auto grid = geometric_sigma_grid(1.0, 0.1, 4);
  const SweepReport r =
      pathwise_sweep(path(0.2, 0.1), PriorSpec::gaussian(0.0, 1.0), kGauss, grid, true);
  ASSERT_TRUE(r.second_moment_track.has_value());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR((*r.second_moment_track)[i], 1.0 / (1.0 + grid[i] * grid[i]), 1e-7);
  }
}

TEST(Sweep, RejectsIncreasingGrid) {
  const std::vector<double> bad{0.1, 0.2};
  EXPECT_THROW(pathwise_sweep(path(1.0, 0.0), PriorSpec::binary(0.5), kGauss, bad), Error);
}

TEST(Tail, NonincreasingCheck) {
  const std::vector<double> g{1.0, 0.1, 0.03, 0.01};
  EXPECT_TRUE(nonincreasing_tail(g, std::vector<double>{5.0, 1.0, 0.5, 0.4}));
  EXPECT_FALSE(nonincreasing_tail(g, std::vector<double>{5.0, 1.0, 0.5, 0.6}));
  // Only sigma <= 10 * sigma_final is inspected.
  EXPECT_TRUE(nonincreasing_tail(g, std::vector<double>{0.1, 1.0, 0.5, 0.4}));
}

TEST(Profile, MaxOverPaths) {
  const auto grid = geometric_sigma_grid(1.0, 0.1, 3);
  std::vector<SweepReport> reports;
  for (double z : {-0.5, 0.9}) {
    reports.push_back(pathwise_sweep(path(1.0, z), PriorSpec::binary(0.5), kGauss, grid));
  }
  const auto prof = max_deviation_profile(reports);
  ASSERT_EQ(prof.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(prof[i], std::max(reports[0].deviations()[i], reports[1].deviations()[i]));
  }
}

TEST(Decomposition, SeparatedSupportsAtomPath) {
  const PriorSpec mix = PriorSpec::mixture(PriorSpec::discrete({{-1.0, 0.5}, {1.0, 0.5}}),
                                           PriorSpec::uniform(5.0, 6.0), 0.5);
  const DecompositionReport r =
      decomposition_check(path(1.0, 0.4, 1), mix, kGauss, geometric_sigma_grid());
  EXPECT_LT(r.final_deviation, 1e-6);
  EXPECT_TRUE(r.tail_nonincreasing());
}

TEST(Decomposition, DegenerateWeightIsExact) {
  const PriorSpec mix =
      PriorSpec::mixture(PriorSpec::point_mass(0.0), PriorSpec::uniform(2.0, 3.0), 0.0);
  const DecompositionReport r =
      decomposition_check(path(2.3, -0.6, 2), mix, kGauss, geometric_sigma_grid());
  for (double d : r.deviations) EXPECT_EQ(d, 0.0);
}

TEST(Decomposition, NestedUniforms) {
  const DecompositionReport r = decomposition_check(
      path(1.5, 0.3, 2), registry_prior("mix_nested_uniform"), kGauss, geometric_sigma_grid());
  EXPECT_LT(r.final_deviation, 1e-2);
}

TEST(Decomposition, RegistryScenarios) {
  for (const auto& s : decomposition_scenarios()) {
    if (!s.separated) continue;
    SCOPED_TRACE(s.name);
    for (std::uint64_t seed : path_seeds(8)) {
      const DecompositionReport r =
          decomposition_check(draw_path(s.mixture, s.noise, seed), s.mixture, s.noise,
                              geometric_sigma_grid());
      EXPECT_LT(r.final_deviation, 1e-3) << "seed " << seed;
    }
  }
}

TEST(Decomposition, RequiresMixture) {
  EXPECT_THROW(decomposition_check(path(1.0, 0.0, 1), PriorSpec::binary(0.5), kGauss,
                                   geometric_sigma_grid()),
               Error);
}

TEST(MmseDimension, GaussianClosedForm) {
  const double s = 1e-2;
  const auto q = mmse_dimension_estimate(PriorSpec::gaussian(0.0, 1.0), kGauss, s,
                                         MmseMethod::Quadrature);
  EXPECT_NEAR(q.value, 1.0 / (1.0 + s * s), 1e-6);
  const auto m = mmse_dimension_estimate(PriorSpec::gaussian(0.0, 1.0), kGauss, s,
                                         MmseMethod::MonteCarlo, 100000, 4);
  EXPECT_NEAR(m.value, q.value, 3.0 * m.error);
  EXPECT_EQ(mmse_dimension_limit(PriorSpec::gaussian(0.0, 1.0), kGauss), 1.0);
}

TEST(MmseDimension, BinaryVanishes) {
  const auto q = mmse_dimension_estimate(PriorSpec::binary(0.5), kGauss, 1e-2, MmseMethod::Quadrature);
  EXPECT_LT(q.value, 1e-3);
  EXPECT_EQ(mmse_dimension_limit(PriorSpec::binary(0.5), kGauss), 0.0);
}

TEST(MmseDimension, MixtureHalf) {
  const PriorSpec mix = registry_prior("mix_atom_uniform");
  const auto q = mmse_dimension_estimate(mix, kGauss, 1e-2, MmseMethod::Quadrature);
  EXPECT_NEAR(q.value, 0.5, 0.025);
  EXPECT_EQ(mmse_dimension_limit(mix, kGauss), 0.5);
  const auto m = mmse_dimension_estimate(mix, kGauss, 1e-2, MmseMethod::MonteCarlo, 200000, 1);
  EXPECT_NEAR(m.value, q.value, 3.0 * m.error);
}

TEST(MmseDimension, LaplaceLimitScalesWithVariance) {
  EXPECT_EQ(mmse_dimension_limit(PriorSpec::uniform(0.0, 1.0), NoiseSpec::laplace()), 2.0);
}

TEST(MmseDimension, DivergentVarianceRejected) {
  try {
    mmse_dimension_estimate(PriorSpec::binary(0.5), NoiseSpec::student_t(1.0), 0.1,
                            MmseMethod::Quadrature);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DivergentMoment);
  }
}

TEST(Doob, GaussianAllAnalytic) {
  const DoobRecord r = doob_registry_lookup(kGauss);
  for (Flag f : r.conditions) EXPECT_EQ(f, Flag::AnalyticTrue);
  EXPECT_TRUE(r.a1_numeric_pass);
  EXPECT_TRUE(r.tail_consistent);
  EXPECT_TRUE(r.doob());
}

TEST(Doob, StudentTHasOnlyNumericA1) {
  const DoobRecord r = doob_registry_lookup(NoiseSpec::student_t(3.0));
  EXPECT_TRUE(r.a1_numeric_pass);
  for (std::size_t i = 1; i < 5; ++i) EXPECT_EQ(r.conditions[i], Flag::Unchecked);
  ASSERT_TRUE(r.fitted_tail_exponent.has_value());
  EXPECT_NEAR(*r.fitted_tail_exponent, 4.0, 0.25);
  EXPECT_TRUE(r.tail_consistent);
  EXPECT_FALSE(r.doob());
}

TEST(Doob, UniformPassesA1) {
  const DoobRecord r = doob_registry_lookup(NoiseSpec::uniform());
  EXPECT_TRUE(r.a1_numeric_pass);
  ASSERT_TRUE(r.sup_pdf.has_value());
  EXPECT_NEAR(*r.sup_pdf, 0.5, 1e-12);
}

TEST(Doob, UnknownNoiseIsUnchecked) {
  const DoobRecord r = doob_registry_lookup(NoiseSpec::student_t(5.0));
  for (Flag f : r.conditions) EXPECT_EQ(f, Flag::Unchecked);
  EXPECT_FALSE(r.sup_pdf.has_value());
  EXPECT_FALSE(r.doob());
}
