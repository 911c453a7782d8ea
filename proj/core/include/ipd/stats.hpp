#pragma once

#include <span>
#include <utility>

#include <Eigen/Dense>

namespace ipd {

// Type-1 quantile: the smallest v in y with #{y <= v} / n >= q.
double sample_quantile(std::span<const double> y, double q);

double normal_cdf(double x) noexcept;
// Inverse standard normal CDF by bisection on normal_cdf, accurate to well
// below 1e-10 in absolute terms. Requires 0 < p < 1.
double normal_quantile(double p);

struct Interval {
  double lo;
  double hi;
  double width() const noexcept { return hi - lo; }
  bool contains(double v) const noexcept { return lo <= v && v <= hi; }
};

// estimate -/+ z_{1 - alpha/2} * se.
Interval normal_ci(double estimate, double se, double alpha);

// A^{-1} V A^{-T}, symmetrized. Throws SingularityError for singular A.
Eigen::MatrixXd sandwich_variance(const Eigen::MatrixXd& bread, const Eigen::MatrixXd& meat);

// Column covariance of the rows of `a` (and cross-covariance with `b`),
// 1/(m-1) scaling.
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& a);
Eigen::MatrixXd sample_cross_covariance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Gaussian kernel density estimate at `at` with Silverman's rule-of-thumb
// bandwidth 0.9 * min(sd, IQR/1.34) * m^(-1/5).
double kernel_density(std::span<const double> values, double at);
double silverman_bandwidth(std::span<const double> values);

}  // namespace ipd
