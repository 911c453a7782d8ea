#include "ipd/methods.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ipd/error.hpp"
#include "ipd/stats.hpp"

namespace ipd {
namespace {

constexpr Method kAllMethods[] = {Method::kPostpiBoot, Method::kPpi,    Method::kPpiPlusPlus,
                                  Method::kPspa,       Method::kOracle, Method::kNaive,
                                  Method::kClassic};

IpdFit make_fit(const Formula& formula, const Split& split, const MethodConfig& config) {
  IpdFit fit;
  fit.method = config.method;
  fit.estimand = config.estimand;
  fit.alpha = config.alpha;
  fit.formula = formula;
  fit.terms = term_names(formula, config.estimand, config.q);
  fit.n = split.n();
  fit.N = split.N();
  return fit;
}

// Fills standard errors and normal intervals from a covariance matrix.
void finalize(IpdFit& fit, Eigen::VectorXd theta, Eigen::MatrixXd cov) {
  const auto p = theta.size();
  fit.estimates = std::move(theta);
  fit.std_errors.resize(p);
  fit.ci_lower.resize(p);
  fit.ci_upper.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double var = cov(j, j);
    if (!(var > 0.0) || !std::isfinite(var) || !std::isfinite(fit.estimates(j))) {
      throw DegenerateError("non-positive variance for term `" +
                            fit.terms[static_cast<std::size_t>(j)] + "`");
    }
    const double se = std::sqrt(var);
    const auto ci = normal_ci(fit.estimates(j), se, fit.alpha);
    fit.std_errors(j) = se;
    fit.ci_lower(j) = ci.lo;
    fit.ci_upper(j) = ci.hi;
  }
  fit.covariance = std::move(cov);
}

void require_binary(const Eigen::VectorXd& y, const char* what) {
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) != 0.0 && y(i) != 1.0) {
      throw ValidationError(std::string("logistic estimand needs a 0/1 ") + what);
    }
  }
}

// Fits the equation with the given weights, starting at zero.
IpdFit fit_weighted(const Formula& formula, const Split& split, const MethodConfig& config,
                    const RectifiedEquation& eq) {
  IpdFit fit = make_fit(formula, split, config);
  const Eigen::VectorXd theta = solve_estimating_equation(eq, Eigen::VectorXd::Zero(eq.dim()));
  finalize(fit, theta, eq.covariance(theta));
  return fit;
}

RectifiedEquation rectified(const Formula& formula, const Split& split,
                            const MethodConfig& config, Eigen::VectorXd weights) {
  auto s = make_samples(formula, split);
  if (config.estimand == Estimand::kLogistic) require_binary(s.labeled_truth.outcome, "outcome");
  return RectifiedEquation(EstimatingFunction(config.estimand, config.q.value_or(0.5)),
                           std::move(s.labeled_truth), std::move(s.labeled_pred),
                           std::move(s.unlabeled_pred), std::move(weights));
}

Eigen::Index param_count(const Formula& formula) {
  return static_cast<Eigen::Index>(formula.covariates.size()) + 1;
}

}  // namespace

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::kPostpiBoot:
      return "postpi_boot";
    case Method::kPpi:
      return "ppi";
    case Method::kPpiPlusPlus:
      return "ppi_plusplus";
    case Method::kPspa:
      return "pspa";
    case Method::kOracle:
      return "oracle";
    case Method::kNaive:
      return "naive";
    case Method::kClassic:
      return "classic";
  }
  return "?";
}

Method parse_method(std::string_view tag) {
  for (auto m : kAllMethods) {
    if (tag == to_string(m)) return m;
  }
  std::string valid;
  for (auto m : kAllMethods) valid += (valid.empty() ? "" : ", ") + std::string(to_string(m));
  throw ConfigError("unknown method `" + std::string(tag) + "` (valid: " + valid + ")");
}

bool is_benchmark(Method m) noexcept {
  return m == Method::kOracle || m == Method::kNaive || m == Method::kClassic;
}

void validate(const MethodConfig& config, const Formula& formula) {
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (config.estimand == Estimand::kQuantile) {
    if (!config.q) throw ConfigError("estimand `quantile` requires q");
    if (!(*config.q > 0.0 && *config.q < 1.0)) throw ConfigError("q must lie in (0, 1)");
  } else if (config.q) {
    throw ConfigError("q is only meaningful for the quantile estimand");
  }
  if (is_regression(config.estimand) && formula.covariates.empty()) {
    throw ConfigError("estimand `" + std::string(to_string(config.estimand)) +
                      "` needs at least one covariate");
  }
  if (!is_regression(config.estimand) && !formula.covariates.empty()) {
    throw ConfigError("estimand `" + std::string(to_string(config.estimand)) +
                      "` takes no covariates (use `Y - f ~ 1`)");
  }
  if (config.method == Method::kPostpiBoot) {
    if (!is_regression(config.estimand)) {
      throw UnsupportedError("method `postpi_boot` does not support estimand `" +
                             std::string(to_string(config.estimand)) +
                             "` (supported: ols, logistic)");
    }
    if (config.nboot < 2) throw ConfigError("nboot must be at least 2");
  }
  if (config.target_term) {
    const auto terms = term_names(formula, config.estimand, config.q);
    if (std::find(terms.begin(), terms.end(), *config.target_term) == terms.end()) {
      throw ConfigError("target term `" + *config.target_term + "` is not a model term");
    }
  }
  if (config.fixed_lambda && !std::isfinite(*config.fixed_lambda)) {
    throw ConfigError("fixed lambda must be finite");
  }
  if (config.fixed_omega && !std::isfinite(*config.fixed_omega)) {
    throw ConfigError("fixed omega must be finite");
  }
}

std::size_t IpdFit::index_of(std::string_view term) const {
  const auto it = std::find(terms.begin(), terms.end(), term);
  if (it == terms.end()) throw ConfigError("fit has no term `" + std::string(term) + "`");
  return static_cast<std::size_t>(it - terms.begin());
}

std::vector<std::string> term_names(const Formula& formula, Estimand estimand,
                                    std::optional<double> q) {
  switch (estimand) {
    case Estimand::kMean:
      return {"mean"};
    case Estimand::kQuantile: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "quantile_%.2f", q.value_or(0.5));
      return {buf};
    }
    case Estimand::kOls:
    case Estimand::kLogistic:
      break;
  }
  std::vector<std::string> out{"(Intercept)"};
  out.insert(out.end(), formula.covariates.begin(), formula.covariates.end());
  return out;
}

SplitSamples make_samples(const Formula& formula, const Split& split) {
  auto truth = design_matrix(split.labeled, formula, Outcome::kObserved);
  auto pred_l = design_matrix(split.labeled, formula, Outcome::kPredicted);
  auto pred_u = design_matrix(split.unlabeled, formula, Outcome::kPredicted);
  return {{std::move(truth.x), std::move(truth.y)},
          {std::move(pred_l.x), std::move(pred_l.y)},
          {std::move(pred_u.x), std::move(pred_u.y)}};
}

TuningPieces tuning_pieces(const RectifiedEquation& eq, const Eigen::VectorXd& theta) {
  if (!eq.has_correction()) throw ValidationError("tuning needs prediction samples");
  const auto& psi = eq.psi();
  const Eigen::MatrixXd a = psi.jacobian(theta, eq.labeled_truth());
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible() || !a.allFinite()) {
    throw SingularityError("labeled Jacobian is singular; cannot tune");
  }
  const Eigen::MatrixXd h = lu.inverse();
  const Eigen::MatrixXd sy = psi.scores(theta, eq.labeled_truth());
  const Eigen::MatrixXd sf = psi.scores(theta, eq.labeled_pred());
  const Eigen::MatrixXd su = psi.scores(theta, eq.unlabeled_pred());
  TuningPieces t;
  t.cross = h * sample_cross_covariance(sy, sf) * h.transpose();
  t.pred_l = h * sample_covariance(sf) * h.transpose();
  t.pred_u = h * sample_covariance(su) * h.transpose();
  t.truth = h * sample_covariance(sy) * h.transpose();
  t.ratio = static_cast<double>(eq.labeled_truth().size()) /
            static_cast<double>(eq.unlabeled_pred().size());
  return t;
}

TuningChoice optimal_lambda(const TuningPieces& t, const std::vector<Eigen::Index>& coords,
                            bool clip) {
  std::vector<Eigen::Index> use = coords;
  if (use.empty()) {
    for (Eigen::Index j = 0; j < t.cross.rows(); ++j) use.push_back(j);
  }
  double num = 0.0, den = 0.0, scale = 0.0;
  for (auto j : use) {
    num += t.cross(j, j);
    den += t.pred_l(j, j) + t.ratio * t.pred_u(j, j);
    scale += t.truth(j, j);
  }
  TuningChoice out{Eigen::VectorXd::Zero(1), false};
  if (!(den > 1e-14 * scale) || !std::isfinite(num / den)) {
    out.degenerate = true;
    return out;
  }
  double lambda = num / den;
  if (clip) lambda = std::clamp(lambda, 0.0, 1.0);
  out.value(0) = lambda;
  return out;
}

TuningChoice optimal_omega(const TuningPieces& t) {
  const auto p = t.cross.rows();
  TuningChoice out{Eigen::VectorXd::Zero(p), false};
  for (Eigen::Index j = 0; j < p; ++j) {
    const double den = t.pred_l(j, j) + t.ratio * t.pred_u(j, j);
    if (!(den > 1e-14 * t.truth(j, j)) || !std::isfinite(t.cross(j, j) / den)) {
      out.degenerate = true;
      continue;
    }
    out.value(j) = std::clamp(t.cross(j, j) / den, 0.0, 1.0);
  }
  return out;
}

IpdFit fit_benchmark(Method kind, const Formula& formula, const Split& split,
                     const MethodConfig& config) {
  if (!is_benchmark(kind)) throw ConfigError("fit_benchmark: not a benchmark method");
  MethodConfig cfg = config;
  cfg.method = kind;
  const EstimatingFunction psi(cfg.estimand, cfg.q.value_or(0.5));
  ScoreSample sample;
  switch (kind) {
    case Method::kOracle: {
      const auto y = split.unlabeled.column(formula.observed);
      if (std::any_of(y.begin(), y.end(), [](double v) { return !std::isfinite(v); })) {
        throw ValidationError("oracle fit needs the true outcome on every unlabeled row");
      }
      auto d = design_matrix(split.unlabeled, formula, Outcome::kObserved);
      sample = {std::move(d.x), std::move(d.y)};
      break;
    }
    case Method::kNaive: {
      auto d = design_matrix(split.unlabeled, formula, Outcome::kPredicted);
      sample = {std::move(d.x), std::move(d.y)};
      break;
    }
    default: {
      auto d = design_matrix(split.labeled, formula, Outcome::kObserved);
      sample = {std::move(d.x), std::move(d.y)};
      break;
    }
  }
  if (cfg.estimand == Estimand::kLogistic) require_binary(sample.outcome, "outcome");
  IpdFit fit = fit_weighted(formula, split, cfg,
                            RectifiedEquation::single_sample(psi, std::move(sample)));
  fit.uses_labeled = kind == Method::kClassic;
  fit.uses_unlabeled = kind != Method::kClassic;
  return fit;
}

IpdFit fit_ppi(const Formula& formula, const Split& split, const MethodConfig& config) {
  MethodConfig cfg = config;
  cfg.method = Method::kPpi;
  const auto p = param_count(formula);
  return fit_weighted(formula, split, cfg,
                      rectified(formula, split, cfg, Eigen::VectorXd::Ones(
                                                         is_regression(cfg.estimand) ? p : 1)));
}

IpdFit fit_ppi_plusplus(const Formula& formula, const Split& split, const MethodConfig& config) {
  MethodConfig cfg = config;
  cfg.method = Method::kPpiPlusPlus;
  const auto p = is_regression(cfg.estimand) ? param_count(formula) : 1;
  const auto eq = rectified(formula, split, cfg, Eigen::VectorXd::Ones(p));

  double lambda = 0.0;
  double raw = 0.0;
  bool degenerate = false;
  if (cfg.fixed_lambda) {
    lambda = raw = *cfg.fixed_lambda;
  } else {
    const Eigen::VectorXd start = solve_estimating_equation(eq, Eigen::VectorXd::Zero(p));
    const auto pieces = tuning_pieces(eq, start);
    std::vector<Eigen::Index> coords;
    if (cfg.target_term) {
      const auto terms = term_names(formula, cfg.estimand, cfg.q);
      coords.push_back(std::find(terms.begin(), terms.end(), *cfg.target_term) - terms.begin());
    }
    const auto unclipped = optimal_lambda(pieces, coords, false);
    raw = unclipped.value(0);
    degenerate = unclipped.degenerate;
    lambda = cfg.lambda_clip ? std::clamp(raw, 0.0, 1.0) : raw;
  }
  IpdFit fit = fit_weighted(formula, split, cfg, eq.with_weights(Eigen::VectorXd::Constant(p, lambda)));
  fit.intermediates["lambda_hat"] = {lambda};
  if (!cfg.fixed_lambda) {
    fit.intermediates["lambda_unclipped"] = {raw};
    fit.intermediates["lambda_degenerate"] = {degenerate ? 1.0 : 0.0};
  }
  return fit;
}

IpdFit fit_pspa(const Formula& formula, const Split& split, const MethodConfig& config) {
  MethodConfig cfg = config;
  cfg.method = Method::kPspa;
  const auto p = is_regression(cfg.estimand) ? param_count(formula) : 1;
  const auto eq = rectified(formula, split, cfg, Eigen::VectorXd::Zero(p));

  Eigen::VectorXd omega;
  bool degenerate = false;
  if (cfg.fixed_omega) {
    omega = Eigen::VectorXd::Constant(p, *cfg.fixed_omega);
  } else {
    // Plug-ins evaluated at the labeled-only estimate.
    const Eigen::VectorXd start = solve_estimating_equation(eq, Eigen::VectorXd::Zero(p));
    const auto choice = optimal_omega(tuning_pieces(eq, start));
    omega = choice.value;
    degenerate = choice.degenerate;
  }
  IpdFit fit = fit_weighted(formula, split, cfg, eq.with_weights(omega));
  fit.intermediates["omega_hat"] = {omega.data(), omega.data() + omega.size()};
  if (!cfg.fixed_omega) fit.intermediates["omega_degenerate"] = {degenerate ? 1.0 : 0.0};
  return fit;
}

IpdFit fit_ipd(const Formula& formula, const Split& split, const MethodConfig& config) {
  validate(config, formula);
  switch (config.method) {
    case Method::kPostpiBoot:
      return fit_postpi_boot(formula, split, config);
    case Method::kPpi:
      return fit_ppi(formula, split, config);
    case Method::kPpiPlusPlus:
      return fit_ppi_plusplus(formula, split, config);
    case Method::kPspa:
      return fit_pspa(formula, split, config);
    case Method::kOracle:
    case Method::kNaive:
    case Method::kClassic:
      return fit_benchmark(config.method, formula, split, config);
  }
  throw ConfigError("unknown method");
}

IpdFit fit_ipd(const Formula& formula, const StackedDataset& data, const MethodConfig& config) {
  validate(config, formula);
  validate(data, formula);
  return fit_ipd(formula, split(data), config);
}

}  // namespace ipd
