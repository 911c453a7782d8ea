#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ipd/formula.hpp"

namespace ipd {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) noexcept { return v != v; }

enum class RowLabel : std::uint8_t { kTraining, kLabeled, kUnlabeled };

std::string_view to_string(RowLabel label) noexcept;
// Throws ValidationError for anything outside the three-word vocabulary.
RowLabel parse_row_label(std::string_view text);

// Named numeric columns of equal length. Missing values are NaN.
class Frame {
 public:
  Frame() = default;

  void add_column(std::string name, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t num_columns() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  bool has(std::string_view name) const noexcept;
  // Throws SchemaError if absent.
  std::span<const double> column(std::string_view name) const;
  std::span<const double> column(std::size_t index) const { return columns_.at(index); }

  Frame select_rows(std::span<const std::size_t> indices) const;

 private:
  std::size_t index_of(std::string_view name) const;

  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
  std::size_t rows_ = 0;
};

// Labeled, unlabeled, and (optionally) training rows stacked in one table,
// partitioned by a label column.
class StackedDataset {
 public:
  StackedDataset(Frame frame, std::vector<RowLabel> labels, std::string label_column,
                 std::size_t label_position = 0);

  const Frame& frame() const noexcept { return frame_; }
  const std::vector<RowLabel>& labels() const noexcept { return labels_; }
  const std::string& label_column() const noexcept { return label_column_; }
  // Position of the label column in the serialized header.
  std::size_t label_position() const noexcept { return label_position_; }
  std::size_t rows() const noexcept { return labels_.size(); }

  std::size_t count(RowLabel label) const noexcept;
  std::vector<std::size_t> rows_with(RowLabel label) const;

  // Copy with an extra numeric column appended.
  StackedDataset with_column(std::string name, std::vector<double> values) const;

 private:
  Frame frame_;
  std::vector<RowLabel> labels_;
  std::string label_column_;
  std::size_t label_position_;
};

// Checks the formula columns exist and that labeled rows carry a finite
// observed outcome and both labeled and unlabeled rows a finite prediction.
void validate(const StackedDataset& data, const Formula& formula);

// Reads a comma-separated table with header. Every column other than
// `label_column` is numeric; "NA" and empty fields are missing.
StackedDataset read_stacked_csv(std::istream& in, std::string_view label_column);
Frame read_frame_csv(std::istream& in);

// read_stacked_csv followed by the schema and invariant checks for `formula`.
StackedDataset load_stacked(std::istream& in, std::string_view label_column,
                            const Formula& formula);

// Builds a stacked dataset from separately supplied labeled and unlabeled
// tables, synthesizing the label column, then validates it.
StackedDataset stack_separate(const Frame& labeled, const Frame& unlabeled,
                              const Formula& formula, std::string label_column = "set");

// 17 significant digits; missing values written as NA.
void write_csv(std::ostream& out, const StackedDataset& data);
void write_csv(std::ostream& out, const Frame& frame);
std::string format_double(double v);

struct Split {
  Frame labeled;
  Frame unlabeled;

  std::size_t n() const noexcept { return labeled.rows(); }
  std::size_t N() const noexcept { return unlabeled.rows(); }
};

// Training rows are dropped. Throws ValidationError if either side is empty.
Split split(const StackedDataset& data);

enum class Outcome { kObserved, kPredicted };

struct Design {
  Eigen::MatrixXd x;  // leading intercept column
  Eigen::VectorXd y;
};

Design design_matrix(const Frame& rows, const Formula& formula, Outcome outcome);

}  // namespace ipd
