#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace ipd {

struct GlmFit {
  Eigen::VectorXd coefficients;
  // Max-norm of the score (OLS: of X'r) at the solution.
  double gradient_norm = 0.0;
  // Hessian of the loss at the solution: X'X for OLS, X'WX (the Hessian of
  // the negative log-likelihood) for logistic.
  Eigen::MatrixXd hessian;
  int iterations = 0;
  bool converged = false;
};

struct LogisticOptions {
  double tol = 1e-8;   // score max-norm
  int max_iter = 50;
  double separation_bound = 30.0;  // coefficient max-norm
};

// Least squares through a Householder QR of X. Throws SingularityError when
// the smallest singular value falls below 1e-10 times the largest.
GlmFit ols_solve(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

// Newton-Raphson on the Bernoulli log-likelihood, starting from zero.
// Throws ValidationError for a single-class y, SeparationError when the
// iterate leaves the separation bound, and ConvergenceError (carrying the
// last iterate) when max_iter is exhausted.
GlmFit logistic_solve(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                      const LogisticOptions& options = {});

double expit(double t) noexcept;

double logistic_log_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& beta);
// Gradient of the log-likelihood: X'(y - p).
Eigen::VectorXd logistic_score(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& beta);
// X'WX with W = diag(p(1-p)).
Eigen::MatrixXd logistic_information(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta);

}  // namespace ipd
