#ifndef PROTOSEG_ELBOW_HPP
#define PROTOSEG_ELBOW_HPP

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "protoseg/fit.hpp"
#include "protoseg/model.hpp"

namespace protoseg {

struct ElbowEntry {
  std::size_t k = 0;
  double cost = 0.0;        // best-of-restarts E
  std::size_t iterations = 0;  // of the best restart
  bool converged = false;
  FitMeta meta;
};

struct ElbowCurve {
  std::vector<ElbowEntry> entries;  // k strictly increasing
  double gamma = 0.0;
  std::string gamma_source;
  std::size_t k_min = 0;
  std::size_t k_max = 0;
  bool nested = false;
  FitConfig config;  // k is ignored
};

/// One best-of-restarts fit per k in [k_min, k_max] with a single gamma resolved
/// up front. With `nested`, each k+1 also runs one restart seeded from the best
/// k solution plus the record farthest from its center, so E never increases
/// along the curve.
///
/// Throws InfeasibleKError unless 1 <= k_min < k_max <= number of distinct records.
ElbowCurve elbow_scan(const MixedDataset& data, std::size_t k_min, std::size_t k_max, const FitConfig& cfg,
                      bool nested);

/// E(k-1) - 2 E(k) + E(k+1) for each interior entry, in curve order.
std::vector<double> second_differences(const ElbowCurve& curve);

/// The interior k with the largest second difference; ties go to the smaller k.
/// Advisory only. Throws InsufficientCurveError with fewer than three entries.
std::size_t detect_elbow(const ElbowCurve& curve);

/// CSV with columns k,cost,iterations,converged. `header` lines are written
/// first, each prefixed with "# ".
void write_curve_csv(std::ostream& out, const ElbowCurve& curve, const std::vector<std::string>& header = {});

}  // namespace protoseg

#endif  // PROTOSEG_ELBOW_HPP
