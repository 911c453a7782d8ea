#pragma once

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "ipd/dataset.hpp"
#include "ipd/simdat.hpp"

namespace ipd::testing {

inline Frame make_frame(std::initializer_list<std::pair<std::string, std::vector<double>>> cols) {
  Frame f;
  for (const auto& [name, values] : cols) f.add_column(name, values);
  return f;
}

inline Split simulated_split(std::uint64_t seed, Estimand model = Estimand::kOls,
                             std::size_t n = 100, std::size_t big_n = 1000) {
  SimConfig cfg;
  cfg.n_labeled = n;
  cfg.n_unlabeled = big_n;
  cfg.model = model;
  cfg.seed = seed;
  return split(simdat(cfg));
}

// Shifts the observed and predicted outcome columns by c.
inline Frame shifted(const Frame& frame, double c) {
  Frame out;
  for (std::size_t j = 0; j < frame.num_columns(); ++j) {
    const auto col = frame.column(j);
    std::vector<double> v(col.begin(), col.end());
    const auto& name = frame.names()[j];
    if (name == "Y" || name == "f") {
      for (auto& x : v) x += c;
    }
    out.add_column(name, std::move(v));
  }
  return out;
}

}  // namespace ipd::testing
