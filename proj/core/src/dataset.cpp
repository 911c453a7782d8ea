#include "ipd/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "ipd/error.hpp"

namespace ipd {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits one record. Double-quoted fields may contain commas; `""` is a
// literal quote.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.emplace_back(trim(cur));
  return fields;
}

double parse_number(std::string_view token, std::size_t row, std::string_view column) {
  token = trim(token);
  if (token.empty() || token == "NA") return kMissing;
  if (token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("non-numeric value `" + std::string(token) + "` in column `" +
                     std::string(column) + "` at row " + std::to_string(row));
  }
  return value;
}

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> records;
};

RawTable read_raw(std::istream& in) {
  RawTable t;
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_record(line);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw ParseError("line " + std::to_string(line_no) + " has " +
                       std::to_string(fields.size()) + " fields, header has " +
                       std::to_string(t.header.size()));
    }
    t.records.push_back(std::move(fields));
  }
  if (!have_header) throw ParseError("input has no header row");
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i].empty()) throw ParseError("empty column name at position " + std::to_string(i));
    for (std::size_t j = 0; j < i; ++j) {
      if (t.header[i] == t.header[j]) throw ParseError("duplicate column `" + t.header[i] + "`");
    }
  }
  return t;
}

Frame numeric_frame(const RawTable& t, std::size_t skip) {
  Frame frame;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (c == skip) continue;
    std::vector<double> values;
    values.reserve(t.records.size());
    for (std::size_t r = 0; r < t.records.size(); ++r) {
      values.push_back(parse_number(t.records[r][c], r + 1, t.header[c]));
    }
    frame.add_column(t.header[c], std::move(values));
  }
  return frame;
}

void write_field_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    out << fields[i];
  }
  out << '\n';
}

}  // namespace

std::string_view to_string(RowLabel label) noexcept {
  switch (label) {
    case RowLabel::kTraining:
      return "training";
    case RowLabel::kLabeled:
      return "labeled";
    case RowLabel::kUnlabeled:
      return "unlabeled";
  }
  return "?";
}

RowLabel parse_row_label(std::string_view text) {
  if (text == "training") return RowLabel::kTraining;
  if (text == "labeled") return RowLabel::kLabeled;
  if (text == "unlabeled") return RowLabel::kUnlabeled;
  throw ValidationError("unknown label value `" + std::string(text) +
                        "` (expected training, labeled, or unlabeled)");
}

void Frame::add_column(std::string name, std::vector<double> values) {
  if (!names_.empty() && values.size() != rows_) {
    throw ValidationError("column `" + name + "` has " + std::to_string(values.size()) +
                          " rows, expected " + std::to_string(rows_));
  }
  if (has(name)) throw ValidationError("duplicate column `" + name + "`");
  rows_ = values.size();
  names_.push_back(std::move(name));
  columns_.push_back(std::move(values));
}

bool Frame::has(std::string_view name) const noexcept {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::size_t Frame::index_of(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) {
    throw SchemaError("missing column `" + std::string(name) + "`", {std::string(name)});
  }
  return static_cast<std::size_t>(it - names_.begin());
}

std::span<const double> Frame::column(std::string_view name) const {
  return columns_[index_of(name)];
}

Frame Frame::select_rows(std::span<const std::size_t> indices) const {
  Frame out;
  for (std::size_t c = 0; c < names_.size(); ++c) {
    std::vector<double> values;
    values.reserve(indices.size());
    for (auto i : indices) values.push_back(columns_[c].at(i));
    out.add_column(names_[c], std::move(values));
  }
  out.rows_ = indices.size();
  return out;
}

StackedDataset::StackedDataset(Frame frame, std::vector<RowLabel> labels,
                               std::string label_column, std::size_t label_position)
    : frame_(std::move(frame)),
      labels_(std::move(labels)),
      label_column_(std::move(label_column)),
      label_position_(std::min(label_position, frame_.num_columns())) {
  if (frame_.num_columns() > 0 && frame_.rows() != labels_.size()) {
    throw ValidationError("label column length does not match table rows");
  }
  if (frame_.has(label_column_)) {
    throw ValidationError("label column `" + label_column_ + "` also appears as a numeric column");
  }
}

std::size_t StackedDataset::count(RowLabel label) const noexcept {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

std::vector<std::size_t> StackedDataset::rows_with(RowLabel label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) out.push_back(i);
  }
  return out;
}

StackedDataset StackedDataset::with_column(std::string name, std::vector<double> values) const {
  Frame frame = frame_;
  frame.add_column(std::move(name), std::move(values));
  return StackedDataset(std::move(frame), labels_, label_column_, label_position_);
}

void validate(const StackedDataset& data, const Formula& formula) {
  std::vector<std::string> missing;
  for (const auto& name : formula.columns()) {
    if (!data.frame().has(name)) missing.push_back(name);
  }
  if (!missing.empty()) {
    std::string msg = "missing required column(s):";
    for (const auto& m : missing) msg += " " + m;
    throw SchemaError(msg, std::move(missing));
  }
  const auto y = data.frame().column(formula.observed);
  const auto f = data.frame().column(formula.predicted);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto label = data.labels()[i];
    if (label == RowLabel::kTraining) continue;
    if (label == RowLabel::kLabeled && !std::isfinite(y[i])) {
      throw ValidationError("labeled row " + std::to_string(i + 1) + " has no finite `" +
                            formula.observed + "`");
    }
    if (!std::isfinite(f[i])) {
      throw ValidationError(std::string(to_string(label)) + " row " + std::to_string(i + 1) +
                            " has no finite `" + formula.predicted + "`");
    }
  }
}

StackedDataset read_stacked_csv(std::istream& in, std::string_view label_column) {
  const RawTable t = read_raw(in);
  const auto it = std::find(t.header.begin(), t.header.end(), label_column);
  if (it == t.header.end()) {
    throw SchemaError("missing label column `" + std::string(label_column) + "`",
                      {std::string(label_column)});
  }
  const auto pos = static_cast<std::size_t>(it - t.header.begin());
  std::vector<RowLabel> labels;
  labels.reserve(t.records.size());
  for (std::size_t r = 0; r < t.records.size(); ++r) {
    try {
      labels.push_back(parse_row_label(t.records[r][pos]));
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(e.what()) + " at row " + std::to_string(r + 1));
    }
  }
  return StackedDataset(numeric_frame(t, pos), std::move(labels), std::string(label_column), pos);
}

Frame read_frame_csv(std::istream& in) {
  return numeric_frame(read_raw(in), static_cast<std::size_t>(-1));
}

StackedDataset load_stacked(std::istream& in, std::string_view label_column,
                            const Formula& formula) {
  auto data = read_stacked_csv(in, label_column);
  validate(data, formula);
  return data;
}

StackedDataset stack_separate(const Frame& labeled, const Frame& unlabeled,
                              const Formula& formula, std::string label_column) {
  Frame frame;
  for (const auto& name : labeled.names()) {
    const auto a = labeled.column(name);
    std::vector<double> values(a.begin(), a.end());
    if (unlabeled.has(name)) {
      const auto b = unlabeled.column(name);
      values.insert(values.end(), b.begin(), b.end());
    } else if (name == formula.observed) {
      values.insert(values.end(), unlabeled.rows(), kMissing);
    } else {
      continue;  // columns absent from the unlabeled table are dropped
    }
    frame.add_column(name, std::move(values));
  }
  std::vector<std::string> missing;
  for (const auto& name : formula.columns()) {
    if (name != formula.observed && !unlabeled.has(name)) missing.push_back(name);
  }
  if (!missing.empty()) {
    std::string msg = "unlabeled table is missing column(s):";
    for (const auto& m : missing) msg += " " + m;
    throw SchemaError(msg, std::move(missing));
  }
  std::vector<RowLabel> labels(labeled.rows(), RowLabel::kLabeled);
  labels.insert(labels.end(), unlabeled.rows(), RowLabel::kUnlabeled);
  StackedDataset data(std::move(frame), std::move(labels), std::move(label_column), 0);
  validate(data, formula);
  return data;
}

std::string format_double(double v) {
  if (is_missing(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const StackedDataset& data) {
  const auto& frame = data.frame();
  std::vector<std::string> fields;
  fields.reserve(frame.num_columns() + 1);
  for (std::size_t c = 0; c <= frame.num_columns(); ++c) {
    if (c == data.label_position()) fields.push_back(data.label_column());
    if (c < frame.num_columns()) fields.push_back(frame.names()[c]);
  }
  write_field_row(out, fields);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    fields.clear();
    for (std::size_t c = 0; c <= frame.num_columns(); ++c) {
      if (c == data.label_position()) fields.emplace_back(to_string(data.labels()[r]));
      if (c < frame.num_columns()) fields.push_back(format_double(frame.column(c)[r]));
    }
    write_field_row(out, fields);
  }
}

void write_csv(std::ostream& out, const Frame& frame) {
  write_field_row(out, frame.names());
  std::vector<std::string> fields;
  for (std::size_t r = 0; r < frame.rows(); ++r) {
    fields.clear();
    for (std::size_t c = 0; c < frame.num_columns(); ++c) {
      fields.push_back(format_double(frame.column(c)[r]));
    }
    write_field_row(out, fields);
  }
}

Split split(const StackedDataset& data) {
  const auto labeled = data.rows_with(RowLabel::kLabeled);
  const auto unlabeled = data.rows_with(RowLabel::kUnlabeled);
  if (labeled.empty()) throw ValidationError("dataset has no labeled rows");
  if (unlabeled.empty()) throw ValidationError("dataset has no unlabeled rows");
  return Split{data.frame().select_rows(labeled), data.frame().select_rows(unlabeled)};
}

Design design_matrix(const Frame& rows, const Formula& formula, Outcome outcome) {
  const auto& name = outcome == Outcome::kObserved ? formula.observed : formula.predicted;
  const auto y = rows.column(name);
  const auto n = static_cast<Eigen::Index>(rows.rows());
  const auto p = static_cast<Eigen::Index>(formula.covariates.size());

  Design d{Eigen::MatrixXd(n, p + 1), Eigen::VectorXd(n)};
  d.x.col(0).setOnes();
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto col = rows.column(formula.covariates[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = col[static_cast<std::size_t>(i)];
      if (!std::isfinite(v)) {
        throw ValidationError("non-finite covariate `" +
                              formula.covariates[static_cast<std::size_t>(j)] + "` at row " +
                              std::to_string(i + 1));
      }
      d.x(i, j + 1) = v;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = y[static_cast<std::size_t>(i)];
    if (!std::isfinite(v)) {
      throw ValidationError("non-finite outcome `" + name + "` at row " + std::to_string(i + 1));
    }
    d.y(i) = v;
  }
  return d;
}

}  // namespace ipd
