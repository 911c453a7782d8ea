#include "ipd/simdat.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ipd/error.hpp"
#include "ipd/glm.hpp"
#include "ipd/rng.hpp"
#include "ipd/stats.hpp"

namespace ipd {

void validate(const SimConfig& config) {
  if (config.n_training < 10 || config.n_labeled < 10 || config.n_unlabeled < 10) {
    throw ConfigError("simdat: every set needs at least 10 rows");
  }
  if (!(config.sigma_y > 0.0)) throw ConfigError("simdat: sigma_y must be positive");
  if (!std::isfinite(config.effect)) throw ConfigError("simdat: effect must be finite");
}

Eigen::Matrix<double, 1, PredictionModel::kBasisSize> PredictionModel::basis(double x1, double x2,
                                                                            double x3, double x4) {
  Eigen::Matrix<double, 1, kBasisSize> b;
  b << 1.0, x1, x2, x2 * x2, x3, x3 * x3, x3 * x3 * x3, x4, x4 * x4;
  return b;
}

double PredictionModel::predict(double x1, double x2, double x3, double x4) const {
  return basis(x1, x2, x3, x4).dot(coefficients_);
}

PredictionModel train_prediction_model(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.cols() != 4) throw ValidationError("prediction model needs exactly four covariates");
  if (x.rows() < 10) throw ValidationError("prediction model needs at least 10 training rows");
  Eigen::MatrixXd design(x.rows(), PredictionModel::kBasisSize);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    design.row(i) = PredictionModel::basis(x(i, 0), x(i, 1), x(i, 2), x(i, 3));
  }
  auto fit = ols_solve(design, y);
  const Eigen::VectorXd resid = y - design * fit.coefficients;
  const double tss = (y.array() - y.mean()).square().sum();
  const double r2 = tss > 0.0 ? 1.0 - resid.squaredNorm() / tss : 1.0;
  return PredictionModel(std::move(fit.coefficients), r2);
}

StackedDataset simdat(const SimConfig& config) {
  validate(config);
  const std::size_t total = config.n_training + config.n_labeled + config.n_unlabeled;
  RngStream rng(config.seed, config.stream);

  Eigen::MatrixXd x(static_cast<Eigen::Index>(total), 4);
  Eigen::VectorXd y(static_cast<Eigen::Index>(total));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) x(i, j) = rng.normal();
    const double x2 = x(i, 1), x3 = x(i, 2), x4 = x(i, 3);
    y(i) = config.effect * x(i, 0) + x2 * x2 / 2.0 + x3 * x3 * x3 / 3.0 + x4 * x4 / 4.0 +
           config.sigma_y * rng.normal();
  }
  const bool binary = config.model == Estimand::kLogistic;
  if (binary) {
    const double cut = sample_quantile({y.data(), total}, 0.5);
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = y(i) > cut ? 1.0 : 0.0;
  }

  const auto n_train = static_cast<Eigen::Index>(config.n_training);
  const auto model = train_prediction_model(x.topRows(n_train), y.head(n_train));

  std::vector<double> f(total, kMissing);
  std::vector<double> f_prob(total, kMissing);
  for (std::size_t i = config.n_training; i < total; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double pred = model.predict(x(r, 0), x(r, 1), x(r, 2), x(r, 3));
    if (binary) {
      f_prob[i] = std::clamp(pred, 0.0, 1.0);
      f[i] = f_prob[i] > 0.5 ? 1.0 : 0.0;
    } else {
      f[i] = pred;
    }
  }

  std::vector<RowLabel> labels(config.n_training, RowLabel::kTraining);
  labels.insert(labels.end(), config.n_labeled, RowLabel::kLabeled);
  labels.insert(labels.end(), config.n_unlabeled, RowLabel::kUnlabeled);

  Frame frame;
  frame.add_column("Y", {y.data(), y.data() + y.size()});
  frame.add_column("f", std::move(f));
  for (Eigen::Index j = 0; j < 4; ++j) {
    std::vector<double> col(total);
    for (std::size_t i = 0; i < total; ++i) col[i] = x(static_cast<Eigen::Index>(i), j);
    frame.add_column("X" + std::to_string(j + 1), std::move(col));
  }
  if (binary) frame.add_column("f_prob", std::move(f_prob));
  return StackedDataset(std::move(frame), std::move(labels), "set", 0);
}

}  // namespace ipd
