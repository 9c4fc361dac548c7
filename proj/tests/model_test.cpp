#include <gtest/gtest.h>

#include <random>

#include "protoseg/error.hpp"
#include "protoseg/fit.hpp"
#include "protoseg/model.hpp"
#include "support/support.hpp"

namespace protoseg {
namespace {

using testing::make_schema;

TEST(NumericSqdist, Examples) {
  const std::vector<double> a{1, 2}, zero{0, 0};
  EXPECT_EQ(numeric_sqdist(a, a), 0.0);
  EXPECT_EQ(numeric_sqdist(a, zero), 5.0);
  const std::vector<double> x{15.47}, q{13.32};
  EXPECT_NEAR(numeric_sqdist(x, q), 4.6225, 1e-12);
}

TEST(NumericSqdist, SymmetricAndChecked) {
  const std::vector<double> a{1.5, -2, 3}, b{0.25, 4, -1};
  EXPECT_EQ(numeric_sqdist(a, b), numeric_sqdist(b, a));
  EXPECT_THROW(numeric_sqdist(a, std::vector<double>{1, 2}), DimensionError);
}

TEST(CategoricalMismatch, Examples) {
  const Code A = 0, B = 1, C = 2;
  EXPECT_EQ(categorical_mismatch(std::vector<Code>{A, B}, std::vector<Code>{A, B}), 0u);
  EXPECT_EQ(categorical_mismatch(std::vector<Code>{A, B}, std::vector<Code>{A, C}), 1u);
  EXPECT_EQ(categorical_mismatch(std::vector<Code>{kUnknownCode}, std::vector<Code>{kUnknownCode}), 1u);
  EXPECT_THROW(categorical_mismatch(std::vector<Code>{A}, std::vector<Code>{A, B}), DimensionError);
}

Prototype center(std::vector<double> numeric, std::vector<Code> modes) {
  Prototype p;
  p.numeric_center = std::move(numeric);
  p.categorical_mode = std::move(modes);
  return p;
}

TEST(MixedDistance, Examples) {
  const MixedRecord r{{1, 2}, {0}};
  EXPECT_EQ(mixed_distance(r.view(), center({0, 0}, {1}), 2.0), 7.0);
  EXPECT_EQ(mixed_distance(r.view(), center({1, 2}, {0}), 3.5), 0.0);
  EXPECT_EQ(mixed_distance(r.view(), center({0, 0}, {1}), 0.0), 5.0);
  EXPECT_THROW(mixed_distance(r.view(), center({0, 0}, {1}), -1.0), ParameterError);
  EXPECT_THROW(mixed_distance(r.view(), center({0}, {1}), 1.0), DimensionError);
}

TEST(ClusterCategoricalCost, Examples) {
  const auto schema = make_schema(0, {2});
  const auto data = MixedDataset(schema, {}, {0, 0, 1});
  const auto upd = update_prototypes(data, Assignment{0, 0, 0}, 1);
  EXPECT_EQ(upd.prototypes[0].categorical_mode[0], 0);
  EXPECT_DOUBLE_EQ(cluster_categorical_cost(upd.prototypes[0], 1.0), 1.0);
  EXPECT_EQ(cluster_categorical_cost(upd.prototypes[0], 0.0), 0.0);

  const auto same = MixedDataset(schema, {}, {1, 1, 1});
  EXPECT_EQ(cluster_categorical_cost(update_prototypes(same, Assignment{0, 0, 0}, 1).prototypes[0], 4.0), 0.0);
}

TEST(ClusterCategoricalCost, EmptyClusterThrows) {
  Prototype p;
  p.categorical_mode = {0};
  p.category_freq = {{0, 0}};
  p.unknown_count = {0};
  EXPECT_THROW(cluster_categorical_cost(p, 1.0), EmptyClusterError);
}

TEST(ClusterCategoricalCost, UnknownMembersCountAsMismatches) {
  const auto data = MixedDataset(make_schema(0, {2}), {}, {0, kUnknownCode, 0});
  const auto p = update_prototypes(data, Assignment{0, 0, 0}, 1).prototypes[0];
  EXPECT_EQ(p.unknown_count[0], 1u);
  EXPECT_EQ(cluster_categorical_mismatches(p), 1u);
}

TEST(Properties, MismatchIdentityOverRandomClusters) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 17;
    const std::vector<std::size_t> cards{std::size_t(2 + trial % 3), std::size_t(1 + trial % 5), 6};
    const auto data = testing::random_dataset(rng, n, 1, cards);
    const auto p = update_prototypes(data, Assignment(n, 0), 1).prototypes[0];
    std::size_t by_member = 0;
    for (std::size_t i = 0; i < n; ++i) by_member += categorical_mismatch(data.record(i).categorical, p.categorical_mode);
    const double gamma = 0.37 * (trial % 7);
    EXPECT_EQ(cluster_categorical_cost(p, gamma), gamma * static_cast<double>(by_member));
    EXPECT_EQ(cluster_categorical_mismatches(p), by_member);
    for (std::size_t j = 0; j < cards.size(); ++j) {
      std::size_t sum = p.unknown_count[j];
      for (std::size_t f : p.category_freq[j]) sum += f;
      EXPECT_EQ(sum, p.member_count);
    }
  }
}

TEST(Properties, ModeIsOptimalByExhaustion) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<std::size_t> cards{3, 6};
    const auto data = testing::random_dataset(rng, 2 + trial % 12, 0, cards);
    const auto p = update_prototypes(data, Assignment(data.size(), 0), 1).prototypes[0];
    auto total = [&](const std::vector<Code>& q) {
      std::size_t s = 0;
      for (std::size_t i = 0; i < data.size(); ++i) s += categorical_mismatch(data.record(i).categorical, q);
      return s;
    };
    const std::size_t at_mode = total(p.categorical_mode);
    for (Code a = 0; a < 3; ++a) {
      for (Code b = 0; b < 6; ++b) EXPECT_LE(at_mode, total({a, b}));
    }
  }
}

TEST(Properties, MeanIsOptimalAgainstPerturbations) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const auto data = testing::random_dataset(rng, 2 + trial % 20, 3, {});
    const auto p = update_prototypes(data, Assignment(data.size(), 0), 1).prototypes[0];
    auto cost = [&](const std::vector<double>& q) {
      double s = 0.0;
      for (std::size_t i = 0; i < data.size(); ++i) s += numeric_sqdist(data.record(i).numeric, q);
      return s;
    };
    const double at_mean = cost(p.numeric_center);
    for (std::size_t j = 0; j < 3; ++j) {
      for (double eps : {-1e-3, 1e-3}) {
        auto q = p.numeric_center;
        q[j] += eps;
        EXPECT_GT(cost(q), at_mean);
      }
    }
  }
}

TEST(DatasetSchema, RejectsInvalidSchemas) {
  EXPECT_THROW(DatasetSchema({}, {}), SchemaError);
  EXPECT_THROW(DatasetSchema({{"a", ""}}, {{"a", CategoryDictionary({"x"})}}), SchemaError);
  EXPECT_THROW(DatasetSchema({{"a", ""}}, {{"b", CategoryDictionary()}}), SchemaError);
  EXPECT_THROW(DatasetSchema({{"a", ""}}, {}, std::vector<Standardization>{{0.0, 0.0}}), SchemaError);
  EXPECT_THROW(CategoryDictionary({"x", "x"}), SchemaError);
}

TEST(DatasetSchema, StandardizationRoundTrip) {
  const DatasetSchema s({{"a", "mi"}}, {}, std::vector<Standardization>{{3.0, 2.0}});
  EXPECT_EQ(s.to_model(0, 7.0), 2.0);
  EXPECT_EQ(s.to_original(0, 2.0), 7.0);
}

TEST(CategoryDictionary, FirstSeenOrder) {
  CategoryDictionary d;
  EXPECT_EQ(d.add("b"), 0);
  EXPECT_EQ(d.add("a"), 1);
  EXPECT_EQ(d.add("b"), 0);
  EXPECT_EQ(d.encode("zzz"), kUnknownCode);
  EXPECT_EQ(d.label(1), "a");
}

TEST(MixedDataset, ValidatesContents) {
  const auto schema = make_schema(1, {2});
  EXPECT_THROW(MixedDataset(schema, {}, {}), EmptyDatasetError);
  EXPECT_THROW(MixedDataset(schema, {1.0, 2.0}, {0}), SchemaError);
  EXPECT_THROW(MixedDataset(schema, {std::nan("")}, {0}), SchemaError);
  EXPECT_THROW(MixedDataset(schema, {1.0}, {2}), SchemaError);
  EXPECT_NO_THROW(MixedDataset(schema, {1.0}, {kUnknownCode}));
  EXPECT_EQ(MixedDataset(schema, {1.0, 1.0, 2.0}, {0, 0, 0}).distinct_count(), 2u);
}

}  // namespace
}  // namespace protoseg
