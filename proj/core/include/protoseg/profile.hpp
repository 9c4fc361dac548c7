#ifndef PROTOSEG_PROFILE_HPP
#define PROTOSEG_PROFILE_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "protoseg/ingest.hpp"
#include "protoseg/model.hpp"

namespace protoseg {

/// 100 * (count of column values strictly below `value`) / column size.
/// Returns 0 for an empty column.
double pooled_percentile(double value, std::span<const double> column);

struct TripMetrics {
  double dollars_per_mile = 0.0;
  double dollars_per_minute = 0.0;
  double speed_mph = 0.0;
  double transit_gap = 0.0;  // fraction: (transit - duration) / duration
};

/// Per-trip economics. Returns nullopt (the trip is excluded) when distance or
/// duration is not strictly positive.
std::optional<TripMetrics> derive_trip_metrics(double fare_usd, double distance_mi, double duration_min,
                                               double transit_min);

/// Cluster-level economics as ratios of means over the eligible trips.
struct TripEconomics {
  double dollars_per_mile = 0.0;
  double dollars_per_minute = 0.0;
  double avg_speed_mph = 0.0;
  double transit_gap_pct = 0.0;
  std::size_t trips_used = 0;          // positive distance and duration
  std::size_t transit_trips_used = 0;  // of those, with a transit time
  std::size_t excluded = 0;
};

TripEconomics aggregate_economics(std::span<const TripRecord* const> trips);

struct NumericProfile {
  std::string name;
  std::string unit;
  double mean = 0.0;               // original units
  double pooled_percentile = 0.0;  // of the mean against all records
};

struct CategoricalProfile {
  std::string name;
  std::string modal_label;
  double within_cluster_pct = 0.0;
};

struct ClusterProfile {
  ClusterIndex cluster = 0;
  std::size_t size = 0;
  double share_pct = 0.0;
  std::vector<NumericProfile> numeric;
  std::vector<CategoricalProfile> categorical;
  double percent_ridesplitting = 0.0;
  TripEconomics economics;
};

struct SharingSummary {
  double authorized_pct = 0.0;
  double matched_given_authorized_pct = 0.0;
  double pooled_pct = 0.0;
};

struct ProfileReport {
  std::vector<ClusterProfile> clusters;
  TripEconomics all_trips;
  SharingSummary sharing;
};

/// Per-cluster summaries in original units. `trips[i]` must be the trip behind
/// dataset row i. Throws DimensionError on length mismatch.
ProfileReport profile_clusters(const MixedDataset& data, const ClusterModel& model,
                               std::span<const TripRecord> trips);

SharingSummary sharing_summary(std::span<const TripRecord> trips);

enum class LocationDirection { Origin, Destination };

struct LocationShare {
  ClusterIndex cluster = 0;
  LocationDirection direction = LocationDirection::Origin;
  std::vector<std::pair<std::string, double>> ranked;  // (area id, % of the cluster's trips)
};

/// Top `top_n` areas per cluster by trip share; ties go to the smaller area id.
std::vector<LocationShare> top_locations(std::span<const TripRecord> trips, const Assignment& assignment,
                                         std::size_t k, LocationDirection direction, std::size_t top_n);

void write_profile_csv(std::ostream& out, const ProfileReport& report, const std::vector<std::string>& header = {});
void write_locations_csv(std::ostream& out, std::span<const LocationShare> shares,
                         const std::vector<std::string>& header = {});

}  // namespace protoseg

#endif  // PROTOSEG_PROFILE_HPP
