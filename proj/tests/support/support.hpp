#ifndef PROTOSEG_TESTS_SUPPORT_HPP
#define PROTOSEG_TESTS_SUPPORT_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "protoseg/fit.hpp"
#include "protoseg/model.hpp"

namespace protoseg::testing {

bool rel_close(double a, double b, double rel, double abs_floor = 1e-12);

/// Schema with attributes x0.. and c0.. where categorical j has `cards[j]`
/// categories labelled "v0", "v1", ...
DatasetSchema make_schema(std::size_t mr, const std::vector<std::size_t>& cards);

/// Random mixed dataset: numerics drawn around a few random centers and
/// rounded to 0.5 so that ties and duplicates occur, codes uniform.
MixedDataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t mr, const std::vector<std::size_t>& cards);

/// Same, but with pairwise-distinct records.
MixedDataset random_distinct_dataset(std::mt19937_64& rng, std::size_t n, std::size_t mr,
                                     const std::vector<std::size_t>& cards);

/// Cost of a labelled partition with block means and modes as centers.
double partition_cost(const MixedDataset& data, const std::vector<int>& labels, int blocks, double gamma);

/// Minimum cost over every partition into at most k non-empty blocks.
double brute_force_optimum(const MixedDataset& data, std::size_t k, double gamma);

/// Plain Lloyd K-means on the numeric matrix from the given centers. Ties go to
/// the lowest center; an empty cluster takes the point farthest from its center
/// among clusters of size >= 2 (lowest index on ties). Returns the assignment
/// after every assignment step until a fixed point or max_iter.
std::vector<Assignment> kmeans_trajectory(const std::vector<std::vector<double>>& points,
                                          std::vector<std::vector<double>> centers, std::size_t max_iter);

double adjusted_rand_index(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

struct PlantedData {
  MixedDataset data;
  std::vector<std::size_t> labels;
};

/// G equal-sized clusters on a regular simplex (pairwise center distance
/// `separation`, unit within-cluster sd) with G numeric and two categorical
/// attributes; cluster g holds category g with probability `dominance`.
PlantedData planted_clusters(std::size_t groups, std::size_t n, std::uint64_t seed, double separation = 10.0,
                             double dominance = 0.8);

struct CityFixture {
  std::filesystem::path dir;
  std::filesystem::path trips;
  std::filesystem::path weather;
  std::filesystem::path transit;
  std::filesystem::path taxi;
  std::filesystem::path config;
  std::size_t segments = 0;
  std::size_t kept_trips = 0;  // trips expected to survive the config filters
};

/// Synthetic November 2018 city in the canonical input format: `segments` trip
/// segments (at most 6) on the vertices of an octahedron in (duration,
/// distance, fare), plus rows the default filters must drop. Writes a config
/// file selecting those three features and shared_matched.
CityFixture write_city_fixture(const std::filesystem::path& dir, std::uint64_t seed, std::size_t per_segment,
                               std::size_t segments = 6);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

std::string read_file(const std::filesystem::path& path);

}  // namespace protoseg::testing

#endif  // PROTOSEG_TESTS_SUPPORT_HPP
