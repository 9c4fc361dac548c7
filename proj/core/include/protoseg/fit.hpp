#ifndef PROTOSEG_FIT_HPP
#define PROTOSEG_FIT_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "protoseg/model.hpp"

namespace protoseg {

enum class InitMethod { RandomRecords, PlusPlus };
enum class EmptyClusterPolicy { ReseedFarthest };

struct FitConfig {
  std::size_t k = 1;
  std::optional<double> gamma;  // estimated from the data when absent
  std::uint64_t seed = 0;
  std::size_t restarts = 10;
  std::size_t max_iter = 100;
  double tol = 1e-8;  // relative improvement of E between full iterations
  InitMethod init = InitMethod::PlusPlus;
  EmptyClusterPolicy empty_cluster_policy = EmptyClusterPolicy::ReseedFarthest;

  /// Throws ParameterError when a bound is violated.
  void validate() const;
};

inline constexpr double kAbsoluteTol = 1e-12;
inline constexpr double kGammaFloor = 1e-6;
inline constexpr const char* kGammaEstimatorTag = "mean-numeric-variance/mean-categorical-gini";

struct GammaEstimate {
  double value = 0.0;
  // Set when every numeric attribute is constant and the floor value was returned.
  bool numeric_degenerate = false;
  std::string source = kGammaEstimatorTag;
};

/// Mean sample variance over numeric attributes divided by the mean of
/// (1 - sum_c p_c^2) over categorical attributes.
///
/// Throws ParameterError without at least one attribute of each kind or with
/// fewer than two records, and DegenerateCategoricalsError when every
/// categorical attribute is constant.
GammaEstimate estimate_gamma(const MixedDataset& data);

/// Resolves the weight used by fit: the explicit config value, else the
/// estimate. Without categorical attributes the weight has no effect and 0 is
/// used; without numeric attributes 1 is used.
GammaEstimate resolve_gamma(const MixedDataset& data, const FitConfig& cfg);

/// Per-restart random stream derived from (seed, restart_index) by a
/// counter-based split.
class SplitRng {
 public:
  SplitRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t next() noexcept;
  /// Uniform in [0, 1).
  double uniform() noexcept;
  /// Uniform in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t s_[4];
};

/// Initial prototypes for one restart; fully determined by (cfg.seed, restart_index).
/// Throws InfeasibleKError when k exceeds the number of distinct records.
std::vector<Prototype> init_prototypes(const MixedDataset& data, const FitConfig& cfg,
                                       std::size_t restart_index, double gamma);

/// Maps every record to its nearest prototype; ties go to the lowest index.
Assignment assign(const MixedDataset& data, std::span<const Prototype> prototypes, double gamma);

struct UpdateResult {
  std::vector<Prototype> prototypes;
  std::vector<ClusterIndex> empty_clusters;
};

/// Recomputes means, modes and frequency tables from an assignment. Modal ties
/// go to the smallest code. Empty clusters are reported and keep a zeroed
/// prototype.
UpdateResult update_prototypes(const MixedDataset& data, const Assignment& assignment, std::size_t k);

struct CostReport {
  double total = 0.0;
  std::vector<ClusterCostBreakdown> breakdowns;
};

/// E = sum_l (E_l^r + E_l^c). Per-cluster sums accumulate in record order and
/// are added in cluster order.
CostReport total_cost(const MixedDataset& data, std::span<const Prototype> prototypes,
                      const Assignment& assignment, double gamma);

enum class FitPhase { Initial, Update, Reseed, Assign };

struct FitEvent {
  std::size_t restart = 0;
  std::size_t iteration = 0;
  FitPhase phase = FitPhase::Initial;
  double cost = 0.0;
  const Assignment* assignment = nullptr;
  std::span<const Prototype> prototypes;
};

using FitObserver = std::function<void(const FitEvent&)>;

struct RestartResult {
  std::vector<Prototype> prototypes;
  Assignment assignment;
  CostReport cost;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Alternates assign/update from the given seeds until the assignment is a
/// fixed point, the relative improvement drops below cfg.tol, or cfg.max_iter
/// iterations ran. Empty clusters take the record farthest from its center.
RestartResult run_restart(const MixedDataset& data, std::vector<Prototype> seeds, double gamma,
                          const FitConfig& cfg, std::size_t restart_index = 0,
                          const FitObserver& observer = {});

/// Best-of-restarts K-prototypes fit. Throws InfeasibleKError when k exceeds
/// the number of distinct records.
ClusterModel fit(const MixedDataset& data, const FitConfig& cfg, const FitObserver& observer = {});

/// fit() plus one extra restart per caller-supplied seed set, run after the
/// regular restarts with continuing restart indices. The best restart wins;
/// ties keep the earlier one.
ClusterModel fit_with_seeds(const MixedDataset& data, const FitConfig& cfg,
                            std::span<const std::vector<Prototype>> extra_seeds,
                            const FitObserver& observer = {});

enum class UnknownPolicy { Lenient, Strict };

/// Nearest prototype of a record expressed in model units. Under
/// UnknownPolicy::Strict a kUnknownCode raises UnknownCategoryError.
ClusterIndex predict(const ClusterModel& model, RecordView record,
                     UnknownPolicy policy = UnknownPolicy::Lenient);

/// Index of the record farthest from its assigned prototype among clusters
/// with at least two members; ties go to the lowest record index.
std::optional<std::size_t> farthest_record(const MixedDataset& data, std::span<const Prototype> prototypes,
                                           const Assignment& assignment, double gamma);

}  // namespace protoseg

#endif  // PROTOSEG_FIT_HPP
