#include "ipd/formula.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "ipd/error.hpp"

namespace ipd {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  const auto first = static_cast<unsigned char>(s.front());
  if (!(std::isalpha(first) || first == '_' || first == '.')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u == '_' || u == '.';
  });
}

constexpr const char* kShape = "expected a formula of the form `Y - f ~ X1 + X2`";

}  // namespace

std::vector<std::string> Formula::columns() const {
  std::vector<std::string> out{observed, predicted};
  out.insert(out.end(), covariates.begin(), covariates.end());
  return out;
}

Formula parse_formula(std::string_view text) {
  if (trim(text).empty()) throw ParseError(std::string("empty formula; ") + kShape);

  const auto sep = text.find_first_of("~=");
  if (sep == std::string_view::npos) {
    throw ParseError("formula has no `~` separator; " + std::string(kShape));
  }
  if (text.find_first_of("~=", sep + 1) != std::string_view::npos) {
    throw ParseError("formula has more than one separator; " + std::string(kShape));
  }

  const auto lhs = trim(text.substr(0, sep));
  const auto rhs = trim(text.substr(sep + 1));

  const auto minus = lhs.find('-');
  if (minus == std::string_view::npos) {
    throw ParseError("left-hand side `" + std::string(lhs) +
                     "` names no predicted outcome; " + kShape);
  }
  Formula f;
  f.observed = std::string(trim(lhs.substr(0, minus)));
  f.predicted = std::string(trim(lhs.substr(minus + 1)));
  if (!is_identifier(f.observed) || !is_identifier(f.predicted)) {
    throw ParseError("left-hand side `" + std::string(lhs) + "` is malformed; " + kShape);
  }
  if (f.observed == f.predicted) {
    throw ValidationError("observed and predicted outcomes must differ (both `" + f.observed +
                          "`)");
  }

  if (!rhs.empty() && rhs != "1") {
    std::set<std::string> seen;
    std::string_view rest = rhs;
    while (true) {
      const auto plus = rest.find('+');
      const auto term = trim(rest.substr(0, plus));
      if (term == "1") {
        // explicit intercept, already implied
      } else if (!is_identifier(term)) {
        throw ParseError("bad covariate term `" + std::string(term) + "`; " + kShape);
      } else {
        std::string name(term);
        if (name == f.observed || name == f.predicted) {
          throw ValidationError("covariate `" + name + "` repeats an outcome column");
        }
        if (!seen.insert(name).second) {
          throw ValidationError("duplicate covariate `" + name + "`");
        }
        f.covariates.push_back(std::move(name));
      }
      if (plus == std::string_view::npos) break;
      rest = rest.substr(plus + 1);
    }
  }
  return f;
}

std::string render_formula(const Formula& formula) {
  std::string out = formula.observed + " - " + formula.predicted + " ~ ";
  if (formula.covariates.empty()) return out + "1";
  for (std::size_t i = 0; i < formula.covariates.size(); ++i) {
    if (i > 0) out += " + ";
    out += formula.covariates[i];
  }
  return out;
}

}  // namespace ipd
