#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace ipd {

enum class Estimand { kMean, kQuantile, kOls, kLogistic };

std::string_view to_string(Estimand e) noexcept;
// Throws ConfigError listing the valid tags.
Estimand parse_estimand(std::string_view tag);
bool is_regression(Estimand e) noexcept;

// Design rows and the outcome fed to psi for one sample. For scalar
// estimands `x` is a single intercept column and is ignored by psi.
struct ScoreSample {
  Eigen::MatrixXd x;
  Eigen::VectorXd outcome;

  Eigen::Index size() const noexcept { return outcome.size(); }
};

// Per-observation estimating function psi(theta; outcome, x):
//   mean      outcome - theta
//   quantile  1{outcome <= theta} - q
//   ols       x (outcome - x'theta)
//   logistic  x (outcome - expit(x'theta))
class EstimatingFunction {
 public:
  explicit EstimatingFunction(Estimand estimand, double q = 0.5);

  Estimand estimand() const noexcept { return estimand_; }
  double q() const noexcept { return q_; }
  bool smooth() const noexcept { return estimand_ != Estimand::kQuantile; }

  // One row of psi per observation.
  Eigen::MatrixXd scores(const Eigen::VectorXd& theta, const ScoreSample& s) const;
  Eigen::VectorXd mean_score(const Eigen::VectorXd& theta, const ScoreSample& s) const;
  // d/dtheta of mean_score. For the quantile the derivative of the ECDF is
  // replaced by a Gaussian kernel density estimate of the outcome at theta.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& theta, const ScoreSample& s) const;

 private:
  Estimand estimand_;
  double q_;
};

// The combined equation behind every direct-calibration fit:
//
//   0 = mean_L psi(theta; Y) + W [ mean_U psi(theta; f) - mean_L psi(theta; f) ]
//
// with W = diag(weights). W = I is the rectified (PPI) equation, W = lambda I
// the power-tuned one, and W = 0 the labeled-only fit. The two prediction
// samples may be empty, in which case only the first term remains.
class RectifiedEquation {
 public:
  RectifiedEquation(EstimatingFunction psi, ScoreSample labeled_truth, ScoreSample labeled_pred,
                    ScoreSample unlabeled_pred, Eigen::VectorXd weights);

  static RectifiedEquation single_sample(EstimatingFunction psi, ScoreSample sample);

  const EstimatingFunction& psi() const noexcept { return psi_; }
  const ScoreSample& labeled_truth() const noexcept { return labeled_truth_; }
  const ScoreSample& labeled_pred() const noexcept { return labeled_pred_; }
  const ScoreSample& unlabeled_pred() const noexcept { return unlabeled_pred_; }
  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  bool has_correction() const noexcept { return unlabeled_pred_.size() > 0; }
  Eigen::Index dim() const noexcept { return labeled_truth_.x.cols(); }

  RectifiedEquation with_weights(Eigen::VectorXd weights) const;

  Eigen::VectorXd value(const Eigen::VectorXd& theta) const;
  // A: derivative of value() in theta.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& theta) const;
  // V = Cov_L[psi_Y - W psi_f] / n + W Cov_U[psi_f] W / N.
  Eigen::MatrixXd meat(const Eigen::VectorXd& theta) const;
  // A^{-1} V A^{-T}.
  Eigen::MatrixXd covariance(const Eigen::VectorXd& theta) const;

 private:
  EstimatingFunction psi_;
  ScoreSample labeled_truth_;
  ScoreSample labeled_pred_;
  ScoreSample unlabeled_pred_;
  Eigen::VectorXd weights_;
};

struct SolverOptions {
  double tol = 1e-9;  // residual max-norm
  int max_iter = 100;
  int max_halvings = 20;
};

// Smooth estimands: damped Newton from `start`, halving the step while the
// residual norm fails to decrease. Quantile: bisection over the jump points
// of the combined step function, returning the jump location (its left
// endpoint). Throws ConvergenceError when the budget runs out.
Eigen::VectorXd solve_estimating_equation(const RectifiedEquation& eq,
                                          const Eigen::VectorXd& start,
                                          const SolverOptions& options = {});

}  // namespace ipd
