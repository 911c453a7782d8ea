#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ipd/dataset.hpp"
#include "ipd/methods.hpp"

namespace ipd {

struct TidyRow {
  std::string term;
  double estimate = 0.0;
  double std_error = 0.0;
  double conf_low = 0.0;
  double conf_high = 0.0;

  friend bool operator==(const TidyRow&, const TidyRow&) = default;
};

struct GlanceRow {
  std::string method;
  std::string estimand;
  std::size_t n_labeled = 0;
  std::size_t n_unlabeled = 0;
  double alpha = 0.05;
  std::size_t n_terms = 0;
  bool uses_unlabeled = true;
  // Scalar view of the fit's intermediates, e.g. "lambda_hat" or
  // "omega_hat[X1]".
  std::map<std::string, double> intermediate_summary;

  friend bool operator==(const GlanceRow&, const GlanceRow&) = default;
};

std::vector<TidyRow> tidy(const IpdFit& fit);
GlanceRow glance(const IpdFit& fit);

// Appends .fitted (x'theta, or expit(x'theta) for logistic) on labeled and
// unlabeled rows and .resid = Y - .fitted where Y is observed. Training rows
// get NA. Throws UnsupportedError for scalar estimands.
StackedDataset augment(const IpdFit& fit, const StackedDataset& data);

// Abbreviated: method, estimand and point estimates.
std::string render_print(const IpdFit& fit);
// Header plus one line per term with estimate, SE and interval, 6 significant
// digits.
std::string render_summary(const IpdFit& fit);

// JSON: tidy is an array of {term, estimate, std_error, conf_low, conf_high};
// glance an object with snake_case keys.
std::string tidy_to_json(const std::vector<TidyRow>& rows);
std::vector<TidyRow> tidy_from_json(std::string_view text);
std::string glance_to_json(const GlanceRow& row);
GlanceRow glance_from_json(std::string_view text);
// {"glance": {...}, "tidy": [...]}
std::string fit_to_json(const IpdFit& fit, int indent = 2);
// {"error": {"kind": ..., "message": ...}}
std::string error_to_json(std::string_view kind, std::string_view message);

}  // namespace ipd
