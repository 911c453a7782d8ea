#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ipd/error.hpp"
#include "ipd/methods.hpp"
#include "test_support.hpp"

namespace ipd {
namespace {

using testing::make_frame;
using testing::simulated_split;

const Formula kOls = parse_formula("Y - f ~ X1");

MethodConfig boot_config(std::uint64_t seed, int nboot = 200) {
  MethodConfig c;
  c.method = Method::kPostpiBoot;
  c.estimand = Estimand::kOls;
  c.seed = seed;
  c.nboot = nboot;
  return c;
}

TEST(PostpiBoot, SeedDeterminesResult) {
  const auto s = simulated_split(1);
  const auto a = fit_postpi_boot(kOls, s, boot_config(5));
  const auto b = fit_postpi_boot(kOls, s, boot_config(5));
  const auto c = fit_postpi_boot(kOls, s, boot_config(6));
  EXPECT_EQ(a.estimates, b.estimates);
  EXPECT_EQ(a.std_errors, b.std_errors);
  EXPECT_NE(a.estimates, c.estimates);
  EXPECT_EQ(a.intermediates.at("nboot")[0], 200.0);
  EXPECT_EQ(a.intermediates.at("relationship_coefficients").size(), 2u);
  EXPECT_EQ(MethodConfig{}.nboot, 200);
}

// Y = 1 + 2 X1 + e with f = Y: the relationship model is the identity, so the
// bootstrap targets the same coefficient as the oracle.
Split linear_truth_split(std::mt19937_64& gen) {
  std::normal_distribution<double> z;
  auto make = [&](std::size_t m) {
    std::vector<double> x(m), f(m), y(m);
    for (std::size_t i = 0; i < m; ++i) {
      x[i] = z(gen);
      y[i] = 1 + 2 * x[i] + z(gen);
      f[i] = y[i];
    }
    return make_frame({{"Y", y}, {"f", f}, {"X1", x}});
  };
  auto lab = make(100);
  return {lab, make(1000)};
}

TEST(PostpiBoot, CorrectRelationshipRecoversOracleTarget) {
  std::mt19937_64 gen(41);
  const int reps = 500;
  std::vector<double> diffs;
  MethodConfig oracle;
  oracle.method = Method::kOracle;
  for (int r = 0; r < reps; ++r) {
    const auto s = linear_truth_split(gen);
    const auto boot = fit_postpi_boot(kOls, s, boot_config(r, 50));
    diffs.push_back(boot.estimates(1) - fit_ipd(kOls, s, oracle).estimates(1));
  }
  double mean = 0, ss = 0;
  for (double d : diffs) mean += d / reps;
  for (double d : diffs) ss += (d - mean) * (d - mean);
  const double mc_se = std::sqrt(ss / (reps - 1) / reps);
  EXPECT_LE(std::abs(mean), 3 * mc_se + 1e-3);
}

TEST(PostpiBoot, ConstantPredictionsDegenerate) {
  Split s{make_frame({{"Y", {1, 2, 3, 4, 5}}, {"f", {2, 2, 2, 2, 2}}, {"X1", {1, 3, 2, 5, 4}}}),
          make_frame({{"Y", {0, 0, 0, 0}}, {"f", {2, 2, 2, 2}}, {"X1", {1, 2, 3, 4}}})};
  EXPECT_THROW(fit_postpi_boot(kOls, s, boot_config(1, 20)), DegenerateError);
}

TEST(PostpiBoot, RejectsScalarEstimands) {
  auto c = boot_config(1);
  c.estimand = Estimand::kMean;
  EXPECT_THROW(fit_ipd(parse_formula("Y - f ~ 1"), simulated_split(2), c), UnsupportedError);
}

TEST(PostpiBoot, LogisticVariant) {
  const auto s = simulated_split(3, Estimand::kLogistic);
  auto c = boot_config(7, 100);
  c.estimand = Estimand::kLogistic;
  const auto fit = fit_ipd(kOls, s, c);
  EXPECT_EQ(fit.estimates.size(), 2);
  EXPECT_TRUE(std::isfinite(fit.estimates(1)));
  EXPECT_GT(fit.std_errors(1), 0.0);
  EXPECT_EQ(fit.intermediates.count("relationship_sigma"), 0u);
  // Logistic X1 effect from thresholding the latent outcome is positive.
  EXPECT_GT(fit.estimates(1), 0.0);
}

}  // namespace
}  // namespace ipd
