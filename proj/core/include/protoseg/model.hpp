#ifndef PROTOSEG_MODEL_HPP
#define PROTOSEG_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace protoseg {

/// Dense integer code of a categorical value within its dictionary.
using Code = std::int32_t;

/// Reserved code for a category absent from the dictionary. It mismatches
/// every code, itself included.
inline constexpr Code kUnknownCode = -1;

using ClusterIndex = std::uint32_t;
using Assignment = std::vector<ClusterIndex>;

struct NumericAttribute {
  std::string name;
  std::string unit;

  friend bool operator==(const NumericAttribute&, const NumericAttribute&) = default;
};

/// Bijection between category labels and codes 0..size()-1, in insertion order.
class CategoryDictionary {
 public:
  CategoryDictionary() = default;
  explicit CategoryDictionary(std::vector<std::string> labels);

  /// Returns the code of `label`, inserting it if unseen.
  Code add(std::string_view label);
  /// Returns kUnknownCode for unseen labels.
  Code encode(std::string_view label) const;
  const std::string& label(Code code) const;

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  friend bool operator==(const CategoryDictionary& a, const CategoryDictionary& b) {
    return a.labels_ == b.labels_;
  }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Code> index_;
};

struct CategoricalAttribute {
  std::string name;
  CategoryDictionary dictionary;

  friend bool operator==(const CategoricalAttribute&, const CategoricalAttribute&) = default;
};

/// z-score transform of one numeric attribute: standard = (original - mean) / stddev.
struct Standardization {
  double mean = 0.0;
  double stddev = 1.0;

  friend bool operator==(const Standardization&, const Standardization&) = default;
};

class DatasetSchema {
 public:
  DatasetSchema() = default;
  /// Throws SchemaError when names collide, the attribute set is empty, a
  /// dictionary is empty, or a stddev is not strictly positive.
  DatasetSchema(std::vector<NumericAttribute> numeric, std::vector<CategoricalAttribute> categorical,
                std::optional<std::vector<Standardization>> standardization = std::nullopt);

  std::size_t numeric_count() const noexcept { return numeric_.size(); }
  std::size_t categorical_count() const noexcept { return categorical_.size(); }

  const std::vector<NumericAttribute>& numeric() const noexcept { return numeric_; }
  const std::vector<CategoricalAttribute>& categorical() const noexcept { return categorical_; }
  const std::optional<std::vector<Standardization>>& standardization() const noexcept {
    return standardization_;
  }
  bool standardized() const noexcept { return standardization_.has_value(); }

  /// Maps a value of numeric attribute `j` from model units back to original units.
  double to_original(std::size_t j, double value) const;
  /// Maps a value of numeric attribute `j` from original units to model units.
  double to_model(std::size_t j, double value) const;

  bool valid_code(std::size_t j, Code code) const noexcept {
    return code == kUnknownCode ||
           (code >= 0 && static_cast<std::size_t>(code) < categorical_[j].dictionary.size());
  }

  friend bool operator==(const DatasetSchema&, const DatasetSchema&) = default;

 private:
  std::vector<NumericAttribute> numeric_;
  std::vector<CategoricalAttribute> categorical_;
  std::optional<std::vector<Standardization>> standardization_;
};

/// Non-owning view of one observation.
struct RecordView {
  std::span<const double> numeric;
  std::span<const Code> categorical;
};

struct MixedRecord {
  std::vector<double> numeric;
  std::vector<Code> categorical;

  RecordView view() const noexcept { return {numeric, categorical}; }
  friend bool operator==(const MixedRecord&, const MixedRecord&) = default;
};

/// Records stored as two row-major matrices (numeric, categorical) against a schema.
class MixedDataset {
 public:
  /// Throws SchemaError on shape mismatch, non-finite numerics or invalid
  /// codes, EmptyDatasetError when no rows are given.
  MixedDataset(DatasetSchema schema, std::vector<double> numeric, std::vector<Code> categorical);

  static MixedDataset from_records(DatasetSchema schema, std::span<const MixedRecord> records);

  const DatasetSchema& schema() const noexcept { return schema_; }
  std::size_t size() const noexcept { return n_; }
  std::size_t numeric_count() const noexcept { return schema_.numeric_count(); }
  std::size_t categorical_count() const noexcept { return schema_.categorical_count(); }

  RecordView record(std::size_t i) const noexcept {
    const std::size_t mr = numeric_count();
    const std::size_t mc = categorical_count();
    return {std::span<const double>(numeric_).subspan(i * mr, mr),
            std::span<const Code>(categorical_).subspan(i * mc, mc)};
  }
  MixedRecord materialize(std::size_t i) const;

  double numeric(std::size_t i, std::size_t j) const noexcept {
    return numeric_[i * numeric_count() + j];
  }
  Code categorical(std::size_t i, std::size_t j) const noexcept {
    return categorical_[i * categorical_count() + j];
  }

  std::span<const double> numeric_matrix() const noexcept { return numeric_; }
  std::span<const Code> categorical_matrix() const noexcept { return categorical_; }

  /// Number of pairwise-distinct records.
  std::size_t distinct_count() const;

 private:
  DatasetSchema schema_;
  std::vector<double> numeric_;
  std::vector<Code> categorical_;
  std::size_t n_ = 0;
};

/// A cluster center: numeric means, categorical modes and the per-attribute
/// category frequency tables of its members. Seed prototypes built from a
/// single record carry empty tables and member_count 0.
struct Prototype {
  std::vector<double> numeric_center;
  std::vector<Code> categorical_mode;
  std::vector<std::vector<std::size_t>> category_freq;
  // Members holding kUnknownCode per attribute; freq sums plus this equal member_count.
  std::vector<std::size_t> unknown_count;
  std::size_t member_count = 0;

  RecordView view() const noexcept { return {numeric_center, categorical_mode}; }

  static Prototype seed(RecordView record, const DatasetSchema& schema);

  friend bool operator==(const Prototype&, const Prototype&) = default;
};

struct ClusterCostBreakdown {
  double numeric_cost = 0.0;
  double categorical_cost = 0.0;
  double total = 0.0;

  static ClusterCostBreakdown make(double numeric_cost, double categorical_cost) {
    return {numeric_cost, categorical_cost, numeric_cost + categorical_cost};
  }
  friend bool operator==(const ClusterCostBreakdown&, const ClusterCostBreakdown&) = default;
};

struct FitMeta {
  std::uint64_t seed = 0;
  std::size_t restarts = 0;
  std::vector<std::size_t> iterations;  // per restart
  std::vector<bool> restart_converged;  // per restart
  std::size_t best_restart = 0;
  bool converged = false;               // of the best restart
  std::string init;                     // "plusplus" | "random-records" | "nested"
  std::string gamma_source;             // "explicit" or the estimator tag
  bool gamma_warning = false;
  std::string config_hash;

  friend bool operator==(const FitMeta&, const FitMeta&) = default;
};

struct ClusterModel {
  DatasetSchema schema;
  std::size_t k = 0;
  double gamma = 0.0;
  std::vector<Prototype> prototypes;
  Assignment assignment;
  double total_cost = 0.0;
  std::vector<ClusterCostBreakdown> breakdowns;
  FitMeta fit_meta;

  friend bool operator==(const ClusterModel&, const ClusterModel&) = default;
};

namespace detail {

inline double sqdist(std::span<const double> x, std::span<const double> q) noexcept {
  double sum = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = x[j] - q[j];
    sum += d * d;
  }
  return sum;
}

inline std::size_t mismatches(std::span<const Code> x, std::span<const Code> q) noexcept {
  std::size_t count = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    count += (x[j] == kUnknownCode || x[j] != q[j]) ? 1 : 0;
  }
  return count;
}

}  // namespace detail

/// Squared Euclidean distance. Throws DimensionError on length mismatch.
double numeric_sqdist(std::span<const double> x, std::span<const double> q);

/// Simple-matching dissimilarity count. kUnknownCode on either side counts as
/// a mismatch. Throws DimensionError on length mismatch.
std::size_t categorical_mismatch(std::span<const Code> x, std::span<const Code> q);

/// numeric_sqdist + gamma * categorical_mismatch. Throws ParameterError when
/// gamma < 0, DimensionError on shape mismatch.
double mixed_distance(RecordView record, const Prototype& prototype, double gamma);

/// Sum over attributes of members not holding the modal code, read from the
/// prototype's frequency tables.
std::size_t cluster_categorical_mismatches(const Prototype& prototype);

/// gamma * sum_j n_l (1 - freq(mode_j) / n_l). Throws EmptyClusterError when
/// the prototype has no members.
double cluster_categorical_cost(const Prototype& prototype, double gamma);

}  // namespace protoseg

#endif  // PROTOSEG_MODEL_HPP
