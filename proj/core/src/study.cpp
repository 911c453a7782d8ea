#include "ipd/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "ipd/error.hpp"
#include "ipd/rng.hpp"

namespace ipd {
namespace {

struct ReplicateResult {
  std::vector<ReplicateRecord> records;
  std::vector<bool> failed;  // per method
};

ReplicateResult run_replicate(const StudyConfig& config, const Formula& formula, std::size_t r) {
  SimConfig sim = config.sim;
  sim.seed = config.seed;
  sim.stream = 2 * static_cast<std::uint64_t>(r);
  const auto data = simdat(sim);
  const auto parts = split(data);
  const std::uint64_t boot_seed = RngStream(config.seed, sim.stream + 1).next_u64();

  ReplicateResult out;
  out.failed.assign(config.methods.size(), false);
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    MethodConfig mc;
    mc.method = config.methods[m];
    mc.estimand = Estimand::kOls;
    mc.alpha = config.alpha;
    mc.nboot = config.nboot;
    mc.seed = boot_seed;
    try {
      const auto fit = fit_ipd(formula, parts, mc);
      const auto j = static_cast<Eigen::Index>(fit.index_of(config.target_term));
      ReplicateRecord rec;
      rec.replicate = r;
      rec.method = mc.method;
      rec.term = config.target_term;
      rec.estimate = fit.estimates(j);
      rec.conf_low = fit.ci_lower(j);
      rec.conf_high = fit.ci_upper(j);
      rec.covered = rec.conf_low <= config.sim.effect && config.sim.effect <= rec.conf_high;
      rec.width = rec.conf_high - rec.conf_low;
      out.records.push_back(std::move(rec));
    } catch (const Error&) {
      out.failed[m] = true;
    }
  }
  return out;
}

}  // namespace

const StudyRow& StudyReport::row(Method m) const {
  const auto it = std::find_if(rows.begin(), rows.end(), [m](const auto& r) { return r.method == m; });
  if (it == rows.end()) throw ConfigError("study has no row for `" + std::string(to_string(m)) + "`");
  return *it;
}

StudyReport run_study(const StudyConfig& config) {
  if (config.replicates < 2) throw ConfigError("study needs at least 2 replicates");
  if (config.sim.model != Estimand::kOls) {
    throw UnsupportedError("the benchmark study covers the ols design only");
  }
  if (config.methods.empty()) throw ConfigError("study needs at least one method");
  validate(config.sim);
  const Formula formula{"Y", "f", {config.target_term}};

  std::vector<ReplicateResult> results(config.replicates);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    while (true) {
      const auto r = next.fetch_add(1);
      if (r >= config.replicates) return;
      try {
        results[r] = run_replicate(config, formula, r);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = config.replicates;
        return;
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(config.jobs, static_cast<unsigned>(config.replicates)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  StudyReport report;
  report.truth = config.sim.effect;
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    StudyRow row;
    row.method = config.methods[m];
    std::size_t covered = 0;
    double width = 0.0, estimate = 0.0;
    for (const auto& res : results) {
      if (res.failed[m]) {
        ++row.failures;
        continue;
      }
      for (const auto& rec : res.records) {
        if (rec.method != row.method) continue;
        ++row.replicates;
        covered += rec.covered ? 1 : 0;
        width += rec.width;
        estimate += rec.estimate;
      }
    }
    if (static_cast<double>(row.failures) >
        config.max_failure_rate * static_cast<double>(config.replicates)) {
      throw DegenerateError("method `" + std::string(to_string(row.method)) + "` failed on " +
                            std::to_string(row.failures) + " of " +
                            std::to_string(config.replicates) + " replicates");
    }
    if (row.replicates > 0) {
      const auto k = static_cast<double>(row.replicates);
      row.coverage = static_cast<double>(covered) / k;
      row.mean_width = width / k;
      row.mean_estimate = estimate / k;
      row.mc_se = std::sqrt(row.coverage * (1.0 - row.coverage) / k);
    }
    report.rows.push_back(row);
  }
  for (auto& res : results) {
    for (auto& rec : res.records) report.records.push_back(std::move(rec));
  }
  return report;
}

void write_report_csv(std::ostream& out, const StudyReport& report) {
  out << "method,replicates,failures,coverage,mean_width,mean_estimate,mc_se\n";
  for (const auto& r : report.rows) {
    out << to_string(r.method) << ',' << r.replicates << ',' << r.failures << ','
        << format_double(r.coverage) << ',' << format_double(r.mean_width) << ','
        << format_double(r.mean_estimate) << ',' << format_double(r.mc_se) << '\n';
  }
}

void write_replicates_csv(std::ostream& out, const StudyReport& report) {
  out << "replicate,method,term,estimate,conf_low,conf_high,covered,width\n";
  for (const auto& r : report.records) {
    out << r.replicate + 1 << ',' << to_string(r.method) << ',' << r.term << ','
        << format_double(r.estimate) << ',' << format_double(r.conf_low) << ','
        << format_double(r.conf_high) << ',' << (r.covered ? 1 : 0) << ','
        << format_double(r.width) << '\n';
  }
}

}  // namespace ipd
