#include "ipd/estimating.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "ipd/error.hpp"
#include "ipd/glm.hpp"
#include "ipd/stats.hpp"

namespace ipd {
namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Fraction of sorted values <= t.
double ecdf(const std::vector<double>& sorted, double t) {
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
  return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

std::vector<double> sorted_copy(const Eigen::VectorXd& v) {
  auto out = to_std(v);
  std::sort(out.begin(), out.end());
  return out;
}

Eigen::VectorXd solve_quantile(const RectifiedEquation& eq) {
  const double q = eq.psi().q();
  const double w = eq.has_correction() ? eq.weights()(0) : 0.0;
  const auto y = sorted_copy(eq.labeled_truth().outcome);
  std::vector<double> fl, fu;
  std::vector<double> candidates = y;
  if (eq.has_correction()) {
    fl = sorted_copy(eq.labeled_pred().outcome);
    fu = sorted_copy(eq.unlabeled_pred().outcome);
    candidates.insert(candidates.end(), fl.begin(), fl.end());
    candidates.insert(candidates.end(), fu.begin(), fu.end());
    std::sort(candidates.begin(), candidates.end());
  }
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  const auto g = [&](double t) {
    double v = ecdf(y, t) - q;
    if (eq.has_correction()) v += w * (ecdf(fu, t) - ecdf(fl, t));
    return v;
  };
  // Invariant: g < 0 strictly left of candidates[lo + 1], g(candidates[hi]) >= 0.
  std::ptrdiff_t lo = -1;
  auto hi = static_cast<std::ptrdiff_t>(candidates.size()) - 1;
  if (g(candidates[static_cast<std::size_t>(hi)]) < 0) {
    throw ConvergenceError("quantile equation has no sign change", {}, 0.0);
  }
  while (hi - lo > 1) {
    const auto mid = lo + (hi - lo) / 2;
    if (g(candidates[static_cast<std::size_t>(mid)]) >= 0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return Eigen::VectorXd::Constant(1, candidates[static_cast<std::size_t>(hi)]);
}

}  // namespace

std::string_view to_string(Estimand e) noexcept {
  switch (e) {
    case Estimand::kMean:
      return "mean";
    case Estimand::kQuantile:
      return "quantile";
    case Estimand::kOls:
      return "ols";
    case Estimand::kLogistic:
      return "logistic";
  }
  return "?";
}

Estimand parse_estimand(std::string_view tag) {
  for (auto e : {Estimand::kMean, Estimand::kQuantile, Estimand::kOls, Estimand::kLogistic}) {
    if (tag == to_string(e)) return e;
  }
  throw ConfigError("unknown estimand `" + std::string(tag) +
                    "` (valid: mean, quantile, ols, logistic)");
}

bool is_regression(Estimand e) noexcept {
  return e == Estimand::kOls || e == Estimand::kLogistic;
}

EstimatingFunction::EstimatingFunction(Estimand estimand, double q) : estimand_(estimand), q_(q) {
  if (estimand == Estimand::kQuantile && !(q > 0.0 && q < 1.0)) {
    throw ConfigError("quantile level q must lie in (0, 1)");
  }
}

Eigen::MatrixXd EstimatingFunction::scores(const Eigen::VectorXd& theta,
                                           const ScoreSample& s) const {
  switch (estimand_) {
    case Estimand::kMean:
      return (s.outcome.array() - theta(0)).matrix();
    case Estimand::kQuantile: {
      Eigen::MatrixXd out(s.size(), 1);
      for (Eigen::Index i = 0; i < s.size(); ++i) {
        out(i, 0) = (s.outcome(i) <= theta(0) ? 1.0 : 0.0) - q_;
      }
      return out;
    }
    case Estimand::kOls: {
      const Eigen::VectorXd r = s.outcome - s.x * theta;
      return s.x.array().colwise() * r.array();
    }
    case Estimand::kLogistic: {
      const Eigen::VectorXd eta = s.x * theta;
      Eigen::VectorXd r(eta.size());
      for (Eigen::Index i = 0; i < eta.size(); ++i) r(i) = s.outcome(i) - expit(eta(i));
      return s.x.array().colwise() * r.array();
    }
  }
  return {};
}

Eigen::VectorXd EstimatingFunction::mean_score(const Eigen::VectorXd& theta,
                                               const ScoreSample& s) const {
  if (estimand_ == Estimand::kQuantile) {
    // Counted directly so the sign agrees exactly with an ECDF comparison.
    Eigen::Index below = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) below += s.outcome(i) <= theta(0) ? 1 : 0;
    return Eigen::VectorXd::Constant(
        1, static_cast<double>(below) / static_cast<double>(s.size()) - q_);
  }
  return scores(theta, s).colwise().mean().transpose();
}

Eigen::MatrixXd EstimatingFunction::jacobian(const Eigen::VectorXd& theta,
                                             const ScoreSample& s) const {
  const auto m = static_cast<double>(s.size());
  switch (estimand_) {
    case Estimand::kMean:
      return Eigen::MatrixXd::Constant(1, 1, -1.0);
    case Estimand::kQuantile:
      return Eigen::MatrixXd::Constant(1, 1, kernel_density(as_span(s.outcome), theta(0)));
    case Estimand::kOls:
      return -(s.x.transpose() * s.x) / m;
    case Estimand::kLogistic:
      return -logistic_information(s.x, theta) / m;
  }
  return {};
}

RectifiedEquation::RectifiedEquation(EstimatingFunction psi, ScoreSample labeled_truth,
                                     ScoreSample labeled_pred, ScoreSample unlabeled_pred,
                                     Eigen::VectorXd weights)
    : psi_(psi),
      labeled_truth_(std::move(labeled_truth)),
      labeled_pred_(std::move(labeled_pred)),
      unlabeled_pred_(std::move(unlabeled_pred)),
      weights_(std::move(weights)) {
  const auto p = labeled_truth_.x.cols();
  if (labeled_truth_.size() == 0) throw ValidationError("estimating equation has no labeled rows");
  if (labeled_truth_.x.rows() != labeled_truth_.size()) {
    throw ValidationError("estimating equation: design/outcome size mismatch");
  }
  if ((labeled_pred_.size() == 0) != (unlabeled_pred_.size() == 0)) {
    throw ValidationError("estimating equation: prediction samples must both be present or absent");
  }
  if (has_correction()) {
    if (labeled_pred_.x.cols() != p || unlabeled_pred_.x.cols() != p) {
      throw ValidationError("estimating equation: design widths differ across samples");
    }
    if (weights_.size() != p) throw ValidationError("estimating equation: weight length mismatch");
  }
  if (!psi_.smooth() && p != 1) throw ValidationError("quantile equation must be scalar");
}

RectifiedEquation RectifiedEquation::single_sample(EstimatingFunction psi, ScoreSample sample) {
  const auto p = sample.x.cols();
  return RectifiedEquation(psi, std::move(sample), {}, {}, Eigen::VectorXd::Zero(p));
}

RectifiedEquation RectifiedEquation::with_weights(Eigen::VectorXd weights) const {
  return RectifiedEquation(psi_, labeled_truth_, labeled_pred_, unlabeled_pred_,
                           std::move(weights));
}

Eigen::VectorXd RectifiedEquation::value(const Eigen::VectorXd& theta) const {
  Eigen::VectorXd g = psi_.mean_score(theta, labeled_truth_);
  if (has_correction()) {
    const Eigen::VectorXd diff =
        psi_.mean_score(theta, unlabeled_pred_) - psi_.mean_score(theta, labeled_pred_);
    g += weights_.cwiseProduct(diff);
  }
  return g;
}

Eigen::MatrixXd RectifiedEquation::jacobian(const Eigen::VectorXd& theta) const {
  Eigen::MatrixXd a = psi_.jacobian(theta, labeled_truth_);
  if (has_correction()) {
    const Eigen::MatrixXd diff =
        psi_.jacobian(theta, unlabeled_pred_) - psi_.jacobian(theta, labeled_pred_);
    a += weights_.asDiagonal() * diff;
  }
  return a;
}

Eigen::MatrixXd RectifiedEquation::meat(const Eigen::VectorXd& theta) const {
  const auto n = static_cast<double>(labeled_truth_.size());
  Eigen::MatrixXd labeled = psi_.scores(theta, labeled_truth_);
  if (!has_correction()) return sample_covariance(labeled) / n;
  labeled -= psi_.scores(theta, labeled_pred_) * weights_.asDiagonal();
  const auto big_n = static_cast<double>(unlabeled_pred_.size());
  const Eigen::MatrixXd unlabeled = sample_covariance(psi_.scores(theta, unlabeled_pred_));
  return sample_covariance(labeled) / n +
         weights_.asDiagonal() * unlabeled * weights_.asDiagonal() / big_n;
}

Eigen::MatrixXd RectifiedEquation::covariance(const Eigen::VectorXd& theta) const {
  return sandwich_variance(jacobian(theta), meat(theta));
}

Eigen::VectorXd solve_estimating_equation(const RectifiedEquation& eq,
                                          const Eigen::VectorXd& start,
                                          const SolverOptions& options) {
  if (!eq.psi().smooth()) return solve_quantile(eq);
  if (start.size() != eq.dim()) throw ValidationError("solver start has the wrong dimension");

  Eigen::VectorXd theta = start;
  Eigen::VectorXd g = eq.value(theta);
  double norm = g.norm();
  for (int it = 0; it < options.max_iter; ++it) {
    if (g.lpNorm<Eigen::Infinity>() <= options.tol) return theta;
    const Eigen::MatrixXd a = eq.jacobian(theta);
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible() || !a.allFinite()) {
      throw SingularityError("estimating equation Jacobian is singular");
    }
    const Eigen::VectorXd step = lu.solve(-g);
    double t = 1.0;
    Eigen::VectorXd next = theta + step;
    Eigen::VectorXd g_next = eq.value(next);
    for (int h = 0; h < options.max_halvings && !(g_next.norm() < norm); ++h) {
      t *= 0.5;
      next = theta + t * step;
      g_next = eq.value(next);
    }
    theta = std::move(next);
    g = std::move(g_next);
    norm = g.norm();
  }
  if (g.lpNorm<Eigen::Infinity>() <= options.tol) return theta;
  throw ConvergenceError("estimating equation did not converge in " +
                             std::to_string(options.max_iter) + " iterations (residual " +
                             std::to_string(g.lpNorm<Eigen::Infinity>()) + ")",
                         to_std(theta), g.lpNorm<Eigen::Infinity>());
}

}  // namespace ipd
