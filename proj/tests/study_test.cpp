#include <sstream>

#include <gtest/gtest.h>

#include "ipd/study.hpp"

namespace ipd {
namespace {

StudyConfig small(unsigned jobs) {
  StudyConfig c;
  c.replicates = 6;
  c.nboot = 30;
  c.seed = 11;
  c.jobs = jobs;
  return c;
}

TEST(Study, RunsAndAggregates) {
  auto c = small(1);
  c.replicates = 2;
  const auto rep = run_study(c);
  EXPECT_EQ(rep.truth, 1.0);
  ASSERT_EQ(rep.rows.size(), c.methods.size());
  EXPECT_EQ(rep.records.size(), 2 * c.methods.size());
  for (const auto& row : rep.rows) {
    EXPECT_EQ(row.replicates + row.failures, 2u);
    EXPECT_GE(row.coverage, 0.0);
    EXPECT_LE(row.coverage, 1.0);
    EXPECT_GT(row.mean_width, 0.0);
  }
  EXPECT_EQ(rep.row(Method::kPspa).method, Method::kPspa);
}

TEST(Study, JobsDoNotChangeOutput) {
  std::ostringstream a, b, la, lb;
  const auto r1 = run_study(small(1));
  const auto r4 = run_study(small(4));
  write_report_csv(a, r1);
  write_report_csv(b, r4);
  write_replicates_csv(la, r1);
  write_replicates_csv(lb, r4);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(la.str(), lb.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')),
            "method,replicates,failures,coverage,mean_width,mean_estimate,mc_se");
}

}  // namespace
}  // namespace ipd
