#include <algorithm>
#include <cmath>
#include <vector>

#include "ipd/error.hpp"
#include "ipd/glm.hpp"
#include "ipd/methods.hpp"
#include "ipd/rng.hpp"
#include "ipd/stats.hpp"

namespace ipd {
namespace {

double median(std::vector<double> v) {
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double std_dev(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Y regressed on [1, f] over the labeled rows.
struct Relationship {
  Eigen::VectorXd coefficients;
  double sigma = 0.0;  // residual SD (continuous model only)
};

Relationship fit_relationship(const Eigen::VectorXd& y, const Eigen::VectorXd& f,
                              bool binary) {
  const auto n = y.size();
  if (f.maxCoeff() == f.minCoeff()) {
    throw DegenerateError("predictions have zero variance on the labeled rows");
  }
  Eigen::MatrixXd x(n, 2);
  x.col(0).setOnes();
  x.col(1) = f;
  Relationship rel;
  try {
    if (binary) {
      rel.coefficients = logistic_solve(x, y).coefficients;
    } else {
      rel.coefficients = ols_solve(x, y).coefficients;
      const Eigen::VectorXd r = y - x * rel.coefficients;
      rel.sigma = std::sqrt(r.squaredNorm() / static_cast<double>(n - 2));
    }
  } catch (const Error& e) {
    throw DegenerateError(std::string("relationship model fit failed: ") + e.what());
  }
  return rel;
}

}  // namespace

IpdFit fit_postpi_boot(const Formula& formula, const Split& split, const MethodConfig& config) {
  if (!is_regression(config.estimand)) {
    throw UnsupportedError("method `postpi_boot` does not support estimand `" +
                           std::string(to_string(config.estimand)) + "`");
  }
  if (config.nboot < 2) throw ConfigError("nboot must be at least 2");
  const bool binary = config.estimand == Estimand::kLogistic;

  const auto truth = design_matrix(split.labeled, formula, Outcome::kObserved);
  const auto pred_l = design_matrix(split.labeled, formula, Outcome::kPredicted);
  const auto pred_u = design_matrix(split.unlabeled, formula, Outcome::kPredicted);
  const auto rel = fit_relationship(truth.y, pred_l.y, binary);

  const auto big_n = static_cast<std::size_t>(pred_u.y.size());
  const auto p = pred_u.x.cols();
  const auto nboot = static_cast<std::size_t>(config.nboot);
  std::vector<std::vector<double>> draws(static_cast<std::size_t>(p));
  std::size_t failures = 0;

  Eigen::MatrixXd xb(static_cast<Eigen::Index>(big_n), p);
  Eigen::VectorXd yb(static_cast<Eigen::Index>(big_n));
  for (std::size_t b = 0; b < nboot; ++b) {
    RngStream rng(config.seed, b);
    const auto idx = resample_indices(big_n, rng);
    for (std::size_t i = 0; i < big_n; ++i) {
      const auto src = static_cast<Eigen::Index>(idx[i]);
      const auto dst = static_cast<Eigen::Index>(i);
      xb.row(dst) = pred_u.x.row(src);
      const double eta = rel.coefficients(0) + rel.coefficients(1) * pred_u.y(src);
      yb(dst) = binary ? (rng.uniform() < expit(eta) ? 1.0 : 0.0) : eta + rel.sigma * rng.normal();
    }
    try {
      const auto fit = binary ? logistic_solve(xb, yb) : ols_solve(xb, yb);
      for (Eigen::Index j = 0; j < p; ++j) {
        draws[static_cast<std::size_t>(j)].push_back(fit.coefficients(j));
      }
    } catch (const Error&) {
      ++failures;
    }
  }
  if (10 * failures > nboot) {
    throw DegenerateError(std::to_string(failures) + " of " + std::to_string(nboot) +
                          " bootstrap replicates failed");
  }
  if (nboot - failures < 2) throw DegenerateError("fewer than two bootstrap replicates succeeded");

  IpdFit fit;
  fit.method = Method::kPostpiBoot;
  fit.estimand = config.estimand;
  fit.alpha = config.alpha;
  fit.formula = formula;
  fit.terms = term_names(formula, config.estimand);
  fit.n = split.n();
  fit.N = split.N();
  fit.estimates.resize(p);
  fit.std_errors.resize(p);
  fit.ci_lower.resize(p);
  fit.ci_upper.resize(p);
  Eigen::MatrixXd draw_matrix(static_cast<Eigen::Index>(draws[0].size()), p);
  for (Eigen::Index j = 0; j < p; ++j) {
    draw_matrix.col(j) = Eigen::Map<const Eigen::VectorXd>(
        draws[static_cast<std::size_t>(j)].data(), draw_matrix.rows());
  }
  fit.covariance = sample_covariance(draw_matrix);
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto& d = draws[static_cast<std::size_t>(j)];
    fit.estimates(j) = median(d);
    const double se = std_dev(d);
    if (!(se > 0.0) || !std::isfinite(se)) {
      throw DegenerateError("bootstrap spread is zero for term `" +
                            fit.terms[static_cast<std::size_t>(j)] + "`");
    }
    fit.std_errors(j) = se;
    const auto ci = normal_ci(fit.estimates(j), se, config.alpha);
    fit.ci_lower(j) = ci.lo;
    fit.ci_upper(j) = ci.hi;
  }
  fit.intermediates["relationship_coefficients"] = {rel.coefficients(0), rel.coefficients(1)};
  if (!binary) fit.intermediates["relationship_sigma"] = {rel.sigma};
  fit.intermediates["nboot"] = {static_cast<double>(nboot)};
  fit.intermediates["bootstrap_failures"] = {static_cast<double>(failures)};
  return fit;
}

}  // namespace ipd
