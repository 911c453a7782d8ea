#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ipd/dataset.hpp"
#include "ipd/estimating.hpp"
#include "ipd/formula.hpp"

namespace ipd {

enum class Method { kPostpiBoot, kPpi, kPpiPlusPlus, kPspa, kOracle, kNaive, kClassic };

std::string_view to_string(Method m) noexcept;
// Throws ConfigError listing the valid tags.
Method parse_method(std::string_view tag);
bool is_benchmark(Method m) noexcept;

struct MethodConfig {
  Method method = Method::kPpi;
  Estimand estimand = Estimand::kOls;
  double alpha = 0.05;
  std::optional<double> q;  // required iff estimand is quantile
  int nboot = 200;          // postpi_boot only
  std::uint64_t seed = 0;   // postpi_boot only
  bool lambda_clip = true;  // ppi_plusplus only

  // Pin the tuning parameter instead of estimating it.
  std::optional<double> fixed_lambda;  // ppi_plusplus
  std::optional<double> fixed_omega;   // pspa, applied to every coordinate
  // Restrict the ppi_plusplus variance criterion to one coefficient;
  // unset means the trace over all coefficients.
  std::optional<std::string> target_term;
};

// Throws ConfigError / UnsupportedError for inconsistent settings.
void validate(const MethodConfig& config, const Formula& formula);

struct IpdFit {
  Method method = Method::kPpi;
  Estimand estimand = Estimand::kOls;
  double alpha = 0.05;
  Formula formula;
  std::vector<std::string> terms;
  Eigen::VectorXd estimates;
  Eigen::VectorXd std_errors;
  Eigen::VectorXd ci_lower;
  Eigen::VectorXd ci_upper;
  Eigen::MatrixXd covariance;
  std::size_t n = 0;  // labeled rows in the data
  std::size_t N = 0;  // unlabeled rows in the data
  bool uses_labeled = true;
  bool uses_unlabeled = true;
  // Relationship-model coefficients, tuning parameters, diagnostics.
  std::map<std::string, std::vector<double>> intermediates;

  std::size_t index_of(std::string_view term) const;
};

// "(Intercept)", covariates... for regressions; "mean" or "quantile_0.50" for
// the scalar estimands.
std::vector<std::string> term_names(const Formula& formula, Estimand estimand,
                                    std::optional<double> q = std::nullopt);

IpdFit fit_ipd(const Formula& formula, const StackedDataset& data, const MethodConfig& config);
IpdFit fit_ipd(const Formula& formula, const Split& split, const MethodConfig& config);

// kind is one of oracle, naive, classic.
IpdFit fit_benchmark(Method kind, const Formula& formula, const Split& split,
                     const MethodConfig& config);
IpdFit fit_postpi_boot(const Formula& formula, const Split& split, const MethodConfig& config);
IpdFit fit_ppi(const Formula& formula, const Split& split, const MethodConfig& config);
IpdFit fit_ppi_plusplus(const Formula& formula, const Split& split, const MethodConfig& config);
IpdFit fit_pspa(const Formula& formula, const Split& split, const MethodConfig& config);

// Score samples for a split, shared by the direct-calibration methods.
struct SplitSamples {
  ScoreSample labeled_truth;
  ScoreSample labeled_pred;
  ScoreSample unlabeled_pred;
};
SplitSamples make_samples(const Formula& formula, const Split& split);

// Plug-in pieces of the variance criterion at theta, in coefficient space
// with H = A_L^{-1} (A_L the labeled-truth Jacobian):
//   cross      H Cov_L(psi_Y, psi_f) H'
//   pred_l     H Cov_L(psi_f) H'
//   pred_u     H Cov_U(psi_f) H'
//   truth      H Cov_L(psi_Y) H'
//   ratio      n / N
struct TuningPieces {
  Eigen::MatrixXd cross;
  Eigen::MatrixXd pred_l;
  Eigen::MatrixXd pred_u;
  Eigen::MatrixXd truth;
  double ratio = 0.0;
};
TuningPieces tuning_pieces(const RectifiedEquation& eq, const Eigen::VectorXd& theta);

struct TuningChoice {
  Eigen::VectorXd value;  // lambda (size 1) or omega (size p)
  bool degenerate = false;
};
// Scalar minimizing sum_j Var(theta_j) over `coords` (all when empty).
TuningChoice optimal_lambda(const TuningPieces& t, const std::vector<Eigen::Index>& coords,
                            bool clip);
// Coordinate-wise weights, clipped to [0, 1].
TuningChoice optimal_omega(const TuningPieces& t);

}  // namespace ipd
