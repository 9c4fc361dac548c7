#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "protoseg/elbow.hpp"
#include "protoseg/error.hpp"
#include "support/support.hpp"

namespace protoseg {
namespace {

ElbowCurve curve_of(std::size_t k_min, const std::vector<double>& costs) {
  ElbowCurve c;
  c.k_min = k_min;
  c.k_max = k_min + costs.size() - 1;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    ElbowEntry e;
    e.k = k_min + i;
    e.cost = costs[i];
    c.entries.push_back(e);
  }
  return c;
}

TEST(DetectElbow, MaxSecondDifference) {
  const auto c = curve_of(2, {100, 40, 10, 9, 8.5});
  const auto d = second_differences(c);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_DOUBLE_EQ(d[0], 30.0);
  EXPECT_DOUBLE_EQ(d[1], 29.0);
  EXPECT_DOUBLE_EQ(d[2], 0.5);
  EXPECT_EQ(detect_elbow(c), 3u);
}

TEST(DetectElbow, LinearCurvePicksSmallestInteriorK) {
  EXPECT_EQ(detect_elbow(curve_of(2, {50, 40, 30, 20, 10})), 3u);
}

TEST(DetectElbow, ScaleInvariant) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> step(0.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> costs{1000.0};
    for (int i = 0; i < 8; ++i) costs.push_back(costs.back() - step(rng));
    std::vector<double> scaled;
    for (double v : costs) scaled.push_back(v * 0.125);
    EXPECT_EQ(detect_elbow(curve_of(2, costs)), detect_elbow(curve_of(2, scaled)));
  }
}

TEST(DetectElbow, NeedsThreePoints) {
  EXPECT_THROW(detect_elbow(curve_of(2, {5, 4})), InsufficientCurveError);
}

TEST(ElbowScan, NestedCurveIsNonIncreasingAndEndsAtZero) {
  std::mt19937_64 rng(9);
  const auto data = testing::random_distinct_dataset(rng, 14, 2, {3});
  FitConfig cfg;
  cfg.restarts = 2;
  const auto curve = elbow_scan(data, 1, 14, cfg, true);
  ASSERT_EQ(curve.entries.size(), 14u);
  for (std::size_t i = 1; i < curve.entries.size(); ++i) {
    EXPECT_EQ(curve.entries[i].k, curve.entries[i - 1].k + 1);
    EXPECT_LE(curve.entries[i].cost, curve.entries[i - 1].cost);
  }
  EXPECT_EQ(curve.entries.back().cost, 0.0);
  EXPECT_EQ(curve.gamma_source, kGammaEstimatorTag);
}

TEST(ElbowScan, SingleGammaAcrossTheScan) {
  std::mt19937_64 rng(10);
  const auto data = testing::random_dataset(rng, 80, 2, {3});
  FitConfig cfg;
  cfg.restarts = 2;
  const auto curve = elbow_scan(data, 2, 5, cfg, false);
  EXPECT_EQ(curve.gamma, estimate_gamma(data).value);
  for (const auto& e : curve.entries) EXPECT_EQ(e.meta.gamma_source, kGammaEstimatorTag);
}

TEST(ElbowScan, InfeasibleRanges) {
  std::mt19937_64 rng(11);
  const auto data = testing::random_distinct_dataset(rng, 6, 1, {2});
  FitConfig cfg;
  EXPECT_THROW(elbow_scan(data, 0, 3, cfg, true), InfeasibleKError);
  EXPECT_THROW(elbow_scan(data, 3, 3, cfg, true), InfeasibleKError);
  EXPECT_THROW(elbow_scan(data, 2, 7, cfg, true), InfeasibleKError);
}

TEST(WriteCurveCsv, Layout) {
  auto c = curve_of(2, {3.5, 1.25, 1});
  c.entries[1].iterations = 4;
  c.entries[1].converged = true;
  std::ostringstream out;
  write_curve_csv(out, c, {"seed=1"});
  EXPECT_EQ(out.str(), "# seed=1\nk,cost,iterations,converged\n2,3.5,0,false\n3,1.25,4,true\n4,1,0,false\n");
}

}  // namespace
}  // namespace protoseg
