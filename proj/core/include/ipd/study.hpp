#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ipd/methods.hpp"
#include "ipd/simdat.hpp"

namespace ipd {

// Monte Carlo comparison of the IPD methods against the oracle, naive and
// classic benchmarks on simulated linear-regression data.
struct StudyConfig {
  SimConfig sim;  // seed/stream are overridden per replicate
  std::size_t replicates = 500;
  double alpha = 0.05;
  int nboot = 200;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::string target_term = "X1";
  std::vector<Method> methods = {Method::kOracle, Method::kNaive,       Method::kClassic,
                                 Method::kPostpiBoot, Method::kPpi, Method::kPpiPlusPlus,
                                 Method::kPspa};
  // Abort when any method fails on more than this share of replicates.
  double max_failure_rate = 0.05;
};

struct ReplicateRecord {
  std::size_t replicate = 0;
  Method method = Method::kPpi;
  std::string term;
  double estimate = 0.0;
  double conf_low = 0.0;
  double conf_high = 0.0;
  bool covered = false;
  double width = 0.0;
};

struct StudyRow {
  Method method = Method::kPpi;
  std::size_t replicates = 0;  // successful fits
  std::size_t failures = 0;
  double coverage = 0.0;
  double mean_width = 0.0;
  double mean_estimate = 0.0;
  double mc_se = 0.0;  // Monte Carlo SE of coverage
};

struct StudyReport {
  double truth = 0.0;
  std::vector<StudyRow> rows;             // in config.methods order
  std::vector<ReplicateRecord> records;   // replicate-major, then method order

  const StudyRow& row(Method m) const;
};

// Replicate r simulates with stream 2r of the top-level seed; postpi_boot
// draws from a seed derived from stream 2r+1. Results do not depend on jobs.
StudyReport run_study(const StudyConfig& config);

// Columns: method, replicates, failures, coverage, mean_width, mean_estimate, mc_se.
void write_report_csv(std::ostream& out, const StudyReport& report);
// Columns: replicate, method, term, estimate, conf_low, conf_high, covered, width.
void write_replicates_csv(std::ostream& out, const StudyReport& report);

}  // namespace ipd
