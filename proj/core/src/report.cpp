#include "ipd/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "ipd/error.hpp"
#include "ipd/glm.hpp"
#include "json.hpp"

namespace ipd {
namespace {

using nlohmann::json;

std::string sig6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

json tidy_row_json(const TidyRow& r) {
  return {{"term", r.term},
          {"estimate", r.estimate},
          {"std_error", r.std_error},
          {"conf_low", r.conf_low},
          {"conf_high", r.conf_high}};
}

json glance_json(const GlanceRow& g) {
  json summary = json::object();
  for (const auto& [k, v] : g.intermediate_summary) summary[k] = v;
  return {{"method", g.method},
          {"estimand", g.estimand},
          {"n_labeled", g.n_labeled},
          {"n_unlabeled", g.n_unlabeled},
          {"alpha", g.alpha},
          {"n_terms", g.n_terms},
          {"uses_unlabeled", g.uses_unlabeled},
          {"intermediate_summary", summary}};
}

json parse(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

std::vector<TidyRow> tidy(const IpdFit& fit) {
  std::vector<TidyRow> rows;
  rows.reserve(fit.terms.size());
  for (std::size_t j = 0; j < fit.terms.size(); ++j) {
    const auto i = static_cast<Eigen::Index>(j);
    rows.push_back({fit.terms[j], fit.estimates(i), fit.std_errors(i), fit.ci_lower(i),
                    fit.ci_upper(i)});
  }
  return rows;
}

GlanceRow glance(const IpdFit& fit) {
  GlanceRow g;
  g.method = std::string(to_string(fit.method));
  g.estimand = std::string(to_string(fit.estimand));
  g.n_labeled = fit.n;
  g.n_unlabeled = fit.N;
  g.alpha = fit.alpha;
  g.n_terms = fit.terms.size();
  g.uses_unlabeled = fit.uses_unlabeled;
  for (const auto& [name, values] : fit.intermediates) {
    if (values.size() == 1) {
      g.intermediate_summary[name] = values[0];
      continue;
    }
    const bool per_term = values.size() == fit.terms.size();
    for (std::size_t j = 0; j < values.size(); ++j) {
      const std::string key = name + "[" + (per_term ? fit.terms[j] : std::to_string(j)) + "]";
      g.intermediate_summary[key] = values[j];
    }
  }
  return g;
}

StackedDataset augment(const IpdFit& fit, const StackedDataset& data) {
  if (!is_regression(fit.estimand)) {
    throw UnsupportedError("augment needs a regression estimand (got `" +
                           std::string(to_string(fit.estimand)) + "`)");
  }
  const auto& frame = data.frame();
  const auto& covariates = fit.formula.covariates;
  std::vector<std::span<const double>> cols;
  for (const auto& c : covariates) cols.push_back(frame.column(c));
  const auto y = frame.column(fit.formula.observed);

  std::vector<double> fitted(data.rows(), kMissing);
  std::vector<double> resid(data.rows(), kMissing);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    if (data.labels()[i] == RowLabel::kTraining) continue;
    double eta = fit.estimates(0);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      eta += fit.estimates(static_cast<Eigen::Index>(j + 1)) * cols[j][i];
    }
    if (!std::isfinite(eta)) continue;
    fitted[i] = fit.estimand == Estimand::kLogistic ? expit(eta) : eta;
    if (std::isfinite(y[i])) resid[i] = y[i] - fitted[i];
  }
  return data.with_column(".fitted", std::move(fitted)).with_column(".resid", std::move(resid));
}

std::string render_print(const IpdFit& fit) {
  std::string out = "IPD fit (method: " + std::string(to_string(fit.method)) +
                    ", estimand: " + std::string(to_string(fit.estimand)) + ")\n";
  if (!fit.formula.observed.empty()) out += "Formula: " + render_formula(fit.formula) + "\n";
  out += "\nCoefficients:\n";
  std::size_t width = 4;
  for (const auto& t : fit.terms) width = std::max(width, t.size());
  for (std::size_t j = 0; j < fit.terms.size(); ++j) {
    out += pad_right(fit.terms[j], width) + "  " +
           pad(sig6(fit.estimates(static_cast<Eigen::Index>(j))), 12) + "\n";
  }
  return out;
}

std::string render_summary(const IpdFit& fit) {
  std::string out;
  out += "Method:    " + std::string(to_string(fit.method)) + "\n";
  out += "Estimand:  " + std::string(to_string(fit.estimand)) + "\n";
  if (!fit.formula.observed.empty()) out += "Formula:   " + render_formula(fit.formula) + "\n";
  out += "Labeled:   n = " + std::to_string(fit.n) + "\n";
  out += "Unlabeled: N = " + std::to_string(fit.N) + "\n";
  out += "Alpha:     " + sig6(fit.alpha) + " (" + sig6(100.0 * (1.0 - fit.alpha)) +
         "% intervals)\n\n";

  std::size_t width = 4;
  for (const auto& t : fit.terms) width = std::max(width, t.size());
  out += pad_right("Term", width) + pad("Estimate", 14) + pad("Std.Error", 14) +
         pad("CI.Lower", 14) + pad("CI.Upper", 14) + "\n";
  for (std::size_t j = 0; j < fit.terms.size(); ++j) {
    const auto i = static_cast<Eigen::Index>(j);
    out += pad_right(fit.terms[j], width) + pad(sig6(fit.estimates(i)), 14) +
           pad(sig6(fit.std_errors(i)), 14) + pad(sig6(fit.ci_lower(i)), 14) +
           pad(sig6(fit.ci_upper(i)), 14) + "\n";
  }
  if (!fit.intermediates.empty()) {
    out += "\nIntermediates:\n";
    for (const auto& [name, values] : fit.intermediates) {
      out += "  " + name + ":";
      for (double v : values) out += " " + sig6(v);
      out += "\n";
    }
  }
  return out;
}

std::string tidy_to_json(const std::vector<TidyRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) arr.push_back(tidy_row_json(r));
  return arr.dump();
}

std::vector<TidyRow> tidy_from_json(std::string_view text) {
  const json arr = parse(text);
  if (!arr.is_array()) throw ParseError("tidy JSON must be an array");
  std::vector<TidyRow> rows;
  try {
    for (const auto& o : arr) {
      rows.push_back({o.at("term").get<std::string>(), o.at("estimate").get<double>(),
                      o.at("std_error").get<double>(), o.at("conf_low").get<double>(),
                      o.at("conf_high").get<double>()});
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed tidy row: ") + e.what());
  }
  return rows;
}

std::string glance_to_json(const GlanceRow& row) { return glance_json(row).dump(); }

GlanceRow glance_from_json(std::string_view text) {
  const json o = parse(text);
  GlanceRow g;
  try {
    g.method = o.at("method").get<std::string>();
    g.estimand = o.at("estimand").get<std::string>();
    g.n_labeled = o.at("n_labeled").get<std::size_t>();
    g.n_unlabeled = o.at("n_unlabeled").get<std::size_t>();
    g.alpha = o.at("alpha").get<double>();
    g.n_terms = o.at("n_terms").get<std::size_t>();
    g.uses_unlabeled = o.at("uses_unlabeled").get<bool>();
    for (const auto& [k, v] : o.at("intermediate_summary").items()) {
      g.intermediate_summary[k] = v.get<double>();
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed glance object: ") + e.what());
  }
  return g;
}

std::string fit_to_json(const IpdFit& fit, int indent) {
  json arr = json::array();
  for (const auto& r : tidy(fit)) arr.push_back(tidy_row_json(r));
  const json out = {{"glance", glance_json(glance(fit))}, {"tidy", arr}};
  return out.dump(indent);
}

std::string error_to_json(std::string_view kind, std::string_view message) {
  const json out = {{"error", {{"kind", std::string(kind)}, {"message", std::string(message)}}}};
  return out.dump();
}

}  // namespace ipd
