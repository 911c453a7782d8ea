#include "ipd/glm.hpp"

#include <cmath>
#include <vector>

#include "ipd/error.hpp"

namespace ipd {
namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// log(1 + exp(t)) without overflow.
double log1pexp(double t) noexcept {
  return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

}  // namespace

double expit(double t) noexcept {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

GlmFit ols_solve(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) throw ValidationError("ols_solve: X and y row counts differ");
  if (x.rows() <= x.cols()) {
    throw ValidationError("ols_solve: need more rows than coefficients");
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(x.cols()).triangularView<Eigen::Upper>();
  // Singular values of R equal those of X.
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(r).singularValues();
  if (!(sv.minCoeff() >= 1e-10 * sv.maxCoeff()) || sv.maxCoeff() == 0.0) {
    throw SingularityError("design matrix is rank deficient");
  }
  GlmFit fit;
  fit.coefficients = qr.solve(y);
  const Eigen::VectorXd resid = y - x * fit.coefficients;
  fit.gradient_norm = (x.transpose() * resid).lpNorm<Eigen::Infinity>();
  fit.hessian = x.transpose() * x;
  fit.iterations = 1;
  fit.converged = true;
  return fit;
}

double logistic_log_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = x * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += y(i) * eta(i) - log1pexp(eta(i));
  return ll;
}

Eigen::VectorXd logistic_score(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = x * beta;
  Eigen::VectorXd resid(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) resid(i) = y(i) - expit(eta(i));
  return x.transpose() * resid;
}

Eigen::MatrixXd logistic_information(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = x * beta;
  Eigen::VectorXd w(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double p = expit(eta(i));
    w(i) = p * (1.0 - p);
  }
  return x.transpose() * w.asDiagonal() * x;
}

GlmFit logistic_solve(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                      const LogisticOptions& options) {
  if (x.rows() != y.size()) throw ValidationError("logistic_solve: X and y row counts differ");
  bool has0 = false, has1 = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) == 0.0) {
      has0 = true;
    } else if (y(i) == 1.0) {
      has1 = true;
    } else {
      throw ValidationError("logistic_solve: outcome must be 0/1");
    }
  }
  if (!has0 || !has1) throw ValidationError("logistic_solve: outcome has a single class");

  GlmFit fit;
  fit.coefficients = Eigen::VectorXd::Zero(x.cols());
  Eigen::VectorXd score = logistic_score(x, y, fit.coefficients);
  for (int it = 0; it < options.max_iter; ++it) {
    fit.gradient_norm = score.lpNorm<Eigen::Infinity>();
    if (fit.gradient_norm < options.tol) {
      fit.iterations = it;
      fit.converged = true;
      fit.hessian = logistic_information(x, fit.coefficients);
      return fit;
    }
    const Eigen::MatrixXd info = logistic_information(x, fit.coefficients);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || !(ldlt.rcond() > 1e-14)) {
      throw SingularityError("logistic_solve: information matrix is singular");
    }
    fit.coefficients += ldlt.solve(score);
    if (!fit.coefficients.allFinite() ||
        fit.coefficients.lpNorm<Eigen::Infinity>() > options.separation_bound) {
      throw SeparationError("logistic_solve: coefficients diverge (separated data)");
    }
    score = logistic_score(x, y, fit.coefficients);
  }
  fit.gradient_norm = score.lpNorm<Eigen::Infinity>();
  if (fit.gradient_norm < options.tol) {
    fit.iterations = options.max_iter;
    fit.converged = true;
    fit.hessian = logistic_information(x, fit.coefficients);
    return fit;
  }
  throw ConvergenceError("logistic_solve: no convergence in " + std::to_string(options.max_iter) +
                             " iterations",
                         to_std(fit.coefficients), fit.gradient_norm);
}

}  // namespace ipd
