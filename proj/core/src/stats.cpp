#include "ipd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "ipd/error.hpp"

namespace ipd {

double sample_quantile(std::span<const double> y, double q) {
  if (y.empty()) throw ValidationError("sample_quantile: empty input");
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("sample_quantile: q must lie in (0, 1)");
  const auto n = y.size();
  // Smallest rank k (1-based) with k / n >= q, evaluated in floating point so
  // that it agrees with an ECDF comparison.
  auto k = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * q));
  k = std::clamp<std::size_t>(k, 1, n);
  while (k > 1 && static_cast<double>(k - 1) / static_cast<double>(n) >= q) --k;
  while (k < n && static_cast<double>(k) / static_cast<double>(n) < q) ++k;
  std::vector<double> work(y.begin(), y.end());
  std::nth_element(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(k - 1), work.end());
  return work[k - 1];
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("normal_quantile: p must lie in (0, 1)");
  double lo = -40.0, hi = 40.0;
  // 200 halvings reach adjacent doubles long before the loop ends.
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (normal_cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Interval normal_ci(double estimate, double se, double alpha) {
  if (!(se >= 0.0)) throw ConfigError("normal_ci: standard error must be non-negative");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("normal_ci: alpha must lie in (0, 1)");
  const double half = normal_quantile(1.0 - alpha / 2.0) * se;
  return {estimate - half, estimate + half};
}

Eigen::MatrixXd sandwich_variance(const Eigen::MatrixXd& bread, const Eigen::MatrixXd& meat) {
  if (bread.rows() != bread.cols() || meat.rows() != meat.cols() || bread.rows() != meat.rows()) {
    throw ValidationError("sandwich_variance: dimension mismatch");
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(bread);
  if (!lu.isInvertible() || !bread.allFinite()) {
    throw SingularityError("sandwich_variance: bread matrix is singular");
  }
  const Eigen::MatrixXd inv = lu.inverse();
  const Eigen::MatrixXd m = inv * meat * inv.transpose();
  return 0.5 * (m + m.transpose());
}

Eigen::MatrixXd sample_cross_covariance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.rows() < 2) {
    throw ValidationError("sample covariance needs at least two matching rows");
  }
  const Eigen::MatrixXd ac = a.rowwise() - a.colwise().mean();
  const Eigen::MatrixXd bc = b.rowwise() - b.colwise().mean();
  return ac.transpose() * bc / static_cast<double>(a.rows() - 1);
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& a) {
  return sample_cross_covariance(a, a);
}

double silverman_bandwidth(std::span<const double> values) {
  const auto m = values.size();
  if (m < 2) throw ValidationError("kernel density needs at least two values");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(m);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(m - 1));
  const double iqr = sample_quantile(v, 0.75) - sample_quantile(v, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd;
  if (!(spread > 0.0)) throw DegenerateError("kernel density: values have zero spread");
  return 0.9 * spread * std::pow(static_cast<double>(m), -0.2);
}

double kernel_density(std::span<const double> values, double at) {
  const double h = silverman_bandwidth(values);
  double sum = 0.0;
  for (double x : values) {
    const double u = (at - x) / h;
    sum += std::exp(-0.5 * u * u);
  }
  return sum / (static_cast<double>(values.size()) * h * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace ipd
