#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "ipd/dataset.hpp"
#include "ipd/estimating.hpp"

namespace ipd {

struct SimConfig {
  std::size_t n_training = 100;
  std::size_t n_labeled = 100;
  std::size_t n_unlabeled = 1000;
  double effect = 1.0;   // coefficient on X1
  double sigma_y = 4.0;  // outcome noise SD
  Estimand model = Estimand::kOls;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// Throws ConfigError when a count is below 10 or sigma_y is not positive.
void validate(const SimConfig& config);

// Additive polynomial regression on {1, X1, X2, X2^2, X3, X3^2, X3^3, X4, X4^2}.
class PredictionModel {
 public:
  static constexpr int kBasisSize = 9;

  explicit PredictionModel(Eigen::VectorXd coefficients, double training_r2 = 0.0)
      : coefficients_(std::move(coefficients)), training_r2_(training_r2) {}

  static Eigen::Matrix<double, 1, kBasisSize> basis(double x1, double x2, double x3, double x4);

  double predict(double x1, double x2, double x3, double x4) const;
  const Eigen::VectorXd& coefficients() const noexcept { return coefficients_; }
  double training_r2() const noexcept { return training_r2_; }

 private:
  Eigen::VectorXd coefficients_;
  double training_r2_;
};

// x has four columns X1..X4. Least squares; needs at least 10 rows.
PredictionModel train_prediction_model(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

// Columns: set, Y, f, X1, X2, X3, X4 (plus f_prob for the logistic model).
//   Y = effect X1 + X2^2/2 + X3^3/3 + X4^2/4 + N(0, sigma_y^2)
// The logistic model thresholds that latent outcome at its sample median;
// f is the trained class probability thresholded at 0.5 and f_prob the
// probability itself. f is NA on training rows; Y is kept on every row.
StackedDataset simdat(const SimConfig& config);

}  // namespace ipd
