#include "protoseg/elbow.hpp"

#include <ostream>
#include <span>

#include "protoseg/error.hpp"
#include "protoseg/format.hpp"

namespace protoseg {

ElbowCurve elbow_scan(const MixedDataset& data, std::size_t k_min, std::size_t k_max, const FitConfig& cfg,
                      bool nested) {
  if (k_min < 1 || k_min >= k_max || k_max > data.size()) {
    throw InfeasibleKError("infeasible k range [" + std::to_string(k_min) + ", " + std::to_string(k_max) +
                           "] for " + std::to_string(data.size()) + " records");
  }
  const std::size_t distinct = data.distinct_count();
  if (k_max > distinct) {
    throw InfeasibleKError("k_max = " + std::to_string(k_max) + " exceeds the number of distinct records (" +
                           std::to_string(distinct) + ")");
  }

  ElbowCurve curve;
  curve.k_min = k_min;
  curve.k_max = k_max;
  curve.nested = nested;
  curve.config = cfg;

  const GammaEstimate gamma = resolve_gamma(data, cfg);
  curve.gamma = gamma.value;
  curve.gamma_source = gamma.source;
  FitConfig scan_cfg = cfg;
  scan_cfg.gamma = gamma.value;

  std::optional<ClusterModel> previous;
  for (std::size_t k = k_min; k <= k_max; ++k) {
    scan_cfg.k = k;
    std::vector<std::vector<Prototype>> seeds;
    if (nested && previous) {
      const auto victim = farthest_record(data, previous->prototypes, previous->assignment, gamma.value);
      if (victim) {
        std::vector<Prototype> grown = previous->prototypes;
        grown.push_back(Prototype::seed(data.record(*victim), data.schema()));
        seeds.push_back(std::move(grown));
      }
    }
    ClusterModel model = fit_with_seeds(data, scan_cfg, seeds);
    model.fit_meta.gamma_source = gamma.source;
    model.fit_meta.gamma_warning = gamma.numeric_degenerate;

    ElbowEntry entry;
    entry.k = k;
    entry.cost = model.total_cost;
    entry.iterations = model.fit_meta.iterations[model.fit_meta.best_restart];
    entry.converged = model.fit_meta.converged;
    entry.meta = model.fit_meta;
    curve.entries.push_back(std::move(entry));
    previous = std::move(model);
  }
  return curve;
}

std::vector<double> second_differences(const ElbowCurve& curve) {
  std::vector<double> out;
  const auto& e = curve.entries;
  for (std::size_t i = 1; i + 1 < e.size(); ++i) {
    out.push_back(e[i - 1].cost - 2.0 * e[i].cost + e[i + 1].cost);
  }
  return out;
}

std::size_t detect_elbow(const ElbowCurve& curve) {
  if (curve.entries.size() < 3) {
    throw InsufficientCurveError("elbow detection needs at least 3 curve points, got " +
                                 std::to_string(curve.entries.size()));
  }
  const auto diffs = second_differences(curve);
  std::size_t best = 0;
  for (std::size_t i = 1; i < diffs.size(); ++i) {
    if (diffs[i] > diffs[best]) best = i;
  }
  return curve.entries[best + 1].k;
}

void write_curve_csv(std::ostream& out, const ElbowCurve& curve, const std::vector<std::string>& header) {
  for (const auto& line : header) out << "# " << line << '\n';
  out << "k,cost,iterations,converged\n";
  for (const auto& e : curve.entries) {
    out << e.k << ',' << format_double(e.cost) << ',' << e.iterations << ',' << (e.converged ? "true" : "false")
        << '\n';
  }
}

}  // namespace protoseg
