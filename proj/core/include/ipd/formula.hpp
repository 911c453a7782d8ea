#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ipd {

// `Y - f ~ X1 + X2`: observed outcome, predicted outcome, covariates.
// An intercept is always included.
struct Formula {
  std::string observed;
  std::string predicted;
  std::vector<std::string> covariates;
  bool intercept = true;

  // Every column the formula references, observed first.
  std::vector<std::string> columns() const;

  friend bool operator==(const Formula&, const Formula&) = default;
};

// Accepts either `~` or `=` as the separator. A right-hand side of `1` (or
// nothing at all) yields an empty covariate list.
Formula parse_formula(std::string_view text);

// Canonical `~` rendering; parse_formula(render_formula(f)) == f.
std::string render_formula(const Formula& formula);

}  // namespace ipd
