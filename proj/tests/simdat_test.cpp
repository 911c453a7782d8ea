#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "ipd/error.hpp"
#include "ipd/methods.hpp"
#include "ipd/simdat.hpp"

namespace ipd {
namespace {

double correlation(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

TEST(Simdat, ShapeAndLabels) {
  SimConfig c;
  c.seed = 1;
  const auto d = simdat(c);
  EXPECT_EQ(d.rows(), 1200u);
  EXPECT_EQ(d.count(RowLabel::kTraining), 100u);
  EXPECT_EQ(d.count(RowLabel::kLabeled), 100u);
  EXPECT_EQ(d.count(RowLabel::kUnlabeled), 1000u);
  EXPECT_EQ(d.frame().names(), (std::vector<std::string>{"Y", "f", "X1", "X2", "X3", "X4"}));
  const auto f = d.frame().column("f");
  for (auto r : d.rows_with(RowLabel::kTraining)) EXPECT_TRUE(is_missing(f[r]));
  for (auto r : d.rows_with(RowLabel::kLabeled)) EXPECT_TRUE(std::isfinite(f[r]));
  EXPECT_NO_THROW(validate(d, parse_formula("Y - f ~ X1 + X2 + X3 + X4")));
}

TEST(Simdat, SameSeedSameBytes) {
  SimConfig c;
  c.seed = 77;
  std::ostringstream a, b, other;
  write_csv(a, simdat(c));
  write_csv(b, simdat(c));
  c.stream = 1;
  write_csv(other, simdat(c));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str(), other.str());
}

TEST(Simdat, OracleCoverageNominal) {
  MethodConfig oracle;
  oracle.method = Method::kOracle;
  const Formula f = parse_formula("Y - f ~ X1");
  int covered = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    SimConfig c;
    c.seed = 1000 + r;
    const auto fit = fit_ipd(f, simdat(c), oracle);
    covered += fit.ci_lower(1) <= 1.0 && 1.0 <= fit.ci_upper(1);
  }
  const double cov = static_cast<double>(covered) / reps;
  EXPECT_GE(cov, 0.90);
  EXPECT_LE(cov, 0.99);
}

TEST(Simdat, PredictionQuality) {
  double sum = 0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    SimConfig c;
    c.seed = 5000 + s;
    const auto d = simdat(c);
    const auto sp = split(d);
    sum += correlation(sp.unlabeled.column("f"), sp.unlabeled.column("Y"));
  }
  EXPECT_GE(sum / seeds, 0.3);
  EXPECT_LE(sum / seeds, 0.9);
}

TEST(PredictionModel, NoiselessFitAndIntercept) {
  std::mt19937_64 gen(51);
  std::normal_distribution<double> z;
  Eigen::MatrixXd x(200, 4);
  Eigen::VectorXd y(200);
  for (int i = 0; i < 200; ++i) {
    for (int j = 0; j < 4; ++j) x(i, j) = z(gen);
    y(i) = 1 + x(i, 0) + x(i, 1) * x(i, 1) / 2 + std::pow(x(i, 2), 3) / 3 + x(i, 3) * x(i, 3) / 4;
  }
  const auto model = train_prediction_model(x, y);
  EXPECT_GE(model.training_r2(), 0.999);
  EXPECT_NEAR(model.predict(0, 0, 0, 0), model.coefficients()(0), 1e-15);
  EXPECT_NEAR(model.predict(0, 0, 0, 0), 1.0, 1e-8);
  EXPECT_NEAR(model.predict(1, 2, -1, 3), 1 + 1 + 2 - 1.0 / 3 + 9.0 / 4, 1e-8);
}

TEST(Simdat, LogisticModel) {
  SimConfig c;
  c.model = Estimand::kLogistic;
  c.seed = 3;
  const auto d = simdat(c);
  EXPECT_TRUE(d.frame().has("f_prob"));
  const auto y = d.frame().column("Y");
  double ones = 0;
  for (double v : y) {
    ASSERT_TRUE(v == 0.0 || v == 1.0);
    ones += v;
  }
  EXPECT_NEAR(ones / d.rows(), 0.5, 0.01);  // median threshold
  for (auto r : d.rows_with(RowLabel::kUnlabeled)) {
    const double p = d.frame().column("f_prob")[r];
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
    EXPECT_EQ(d.frame().column("f")[r], p > 0.5 ? 1.0 : 0.0);
  }
}

TEST(Simdat, ConfigErrors) {
  SimConfig c;
  c.n_labeled = 5;
  EXPECT_THROW(simdat(c), ConfigError);
  c = SimConfig{};
  c.sigma_y = 0;
  EXPECT_THROW(validate(c), ConfigError);
}

}  // namespace
}  // namespace ipd
