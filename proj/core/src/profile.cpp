#include "protoseg/profile.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include "protoseg/csv.hpp"
#include "protoseg/error.hpp"
#include "protoseg/format.hpp"

namespace protoseg {

double pooled_percentile(double value, std::span<const double> column) {
  if (column.empty()) return 0.0;
  std::size_t below = 0;
  for (double v : column) below += v < value ? 1 : 0;
  return 100.0 * static_cast<double>(below) / static_cast<double>(column.size());
}

std::optional<TripMetrics> derive_trip_metrics(double fare_usd, double distance_mi, double duration_min,
                                               double transit_min) {
  if (!(distance_mi > 0.0) || !(duration_min > 0.0)) return std::nullopt;
  return TripMetrics{fare_usd / distance_mi, fare_usd / duration_min, distance_mi / (duration_min / 60.0),
                     (transit_min - duration_min) / duration_min};
}

TripEconomics aggregate_economics(std::span<const TripRecord* const> trips) {
  TripEconomics out;
  double fare = 0.0, distance = 0.0, duration = 0.0;
  double transit_duration = 0.0, transit = 0.0;
  for (const TripRecord* t : trips) {
    if (!(t->distance_mi > 0.0) || !(t->duration_s > 0.0)) {
      ++out.excluded;
      continue;
    }
    ++out.trips_used;
    fare += t->fare_usd;
    distance += t->distance_mi;
    duration += t->duration_s / 60.0;
    if (t->transit_time_s) {
      ++out.transit_trips_used;
      transit_duration += t->duration_s / 60.0;
      transit += *t->transit_time_s / 60.0;
    }
  }
  if (out.trips_used == 0) return out;
  const double n = static_cast<double>(out.trips_used);
  const auto means = derive_trip_metrics(fare / n, distance / n, duration / n, duration / n);
  out.dollars_per_mile = means->dollars_per_mile;
  out.dollars_per_minute = means->dollars_per_minute;
  out.avg_speed_mph = means->speed_mph;
  if (out.transit_trips_used > 0) {
    const double m = static_cast<double>(out.transit_trips_used);
    const auto gap = derive_trip_metrics(fare / n, distance / n, transit_duration / m, transit / m);
    out.transit_gap_pct = 100.0 * gap->transit_gap;
  }
  return out;
}

SharingSummary sharing_summary(std::span<const TripRecord> trips) {
  SharingSummary out;
  if (trips.empty()) return out;
  std::size_t authorized = 0, matched = 0;
  for (const auto& t : trips) {
    authorized += t.shared_authorized ? 1 : 0;
    matched += t.shared_matched ? 1 : 0;
  }
  const double n = static_cast<double>(trips.size());
  out.authorized_pct = 100.0 * static_cast<double>(authorized) / n;
  out.matched_given_authorized_pct =
      authorized == 0 ? 0.0 : 100.0 * static_cast<double>(matched) / static_cast<double>(authorized);
  out.pooled_pct = 100.0 * static_cast<double>(matched) / n;
  return out;
}

ProfileReport profile_clusters(const MixedDataset& data, const ClusterModel& model,
                               std::span<const TripRecord> trips) {
  const std::size_t n = data.size();
  const std::size_t k = model.k;
  if (model.assignment.size() != n) throw DimensionError("model assignment length differs from the dataset");
  if (trips.size() != n) throw DimensionError("trip count differs from the dataset");
  const DatasetSchema& schema = data.schema();
  const std::size_t mr = schema.numeric_count();
  const std::size_t mc = schema.categorical_count();

  std::vector<std::size_t> sizes(k, 0);
  for (ClusterIndex l : model.assignment) {
    if (l >= k) throw ParameterError("assignment value outside 0..k-1");
    ++sizes[l];
  }

  // Original-unit columns for the pooled percentiles.
  std::vector<std::vector<double>> columns(mr, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < mr; ++j) columns[j][i] = schema.to_original(j, data.numeric(i, j));
  }

  ProfileReport report;
  std::vector<std::vector<const TripRecord*>> members(k);
  for (std::size_t i = 0; i < n; ++i) members[model.assignment[i]].push_back(&trips[i]);

  for (std::size_t l = 0; l < k; ++l) {
    ClusterProfile p;
    p.cluster = static_cast<ClusterIndex>(l);
    p.size = sizes[l];
    p.share_pct = 100.0 * static_cast<double>(sizes[l]) / static_cast<double>(n);

    std::vector<double> sums(mr, 0.0);
    std::vector<std::vector<std::size_t>> counts(mc);
    for (std::size_t j = 0; j < mc; ++j) counts[j].assign(schema.categorical()[j].dictionary.size() + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (model.assignment[i] != l) continue;
      for (std::size_t j = 0; j < mr; ++j) sums[j] += columns[j][i];
      for (std::size_t j = 0; j < mc; ++j) {
        const Code c = data.categorical(i, j);
        ++counts[j][c == kUnknownCode ? counts[j].size() - 1 : static_cast<std::size_t>(c)];
      }
    }
    for (std::size_t j = 0; j < mr; ++j) {
      NumericProfile np;
      np.name = schema.numeric()[j].name;
      np.unit = schema.numeric()[j].unit;
      np.mean = p.size == 0 ? 0.0 : sums[j] / static_cast<double>(p.size);
      np.pooled_percentile = pooled_percentile(np.mean, columns[j]);
      p.numeric.push_back(std::move(np));
    }
    for (std::size_t j = 0; j < mc; ++j) {
      const auto& dict = schema.categorical()[j].dictionary;
      const auto known_end = counts[j].begin() + static_cast<std::ptrdiff_t>(dict.size());
      const auto mode = std::max_element(counts[j].begin(), known_end);
      CategoricalProfile cp;
      cp.name = schema.categorical()[j].name;
      cp.modal_label = dict.label(static_cast<Code>(mode - counts[j].begin()));
      cp.within_cluster_pct = p.size == 0 ? 0.0 : 100.0 * static_cast<double>(*mode) / static_cast<double>(p.size);
      p.categorical.push_back(std::move(cp));
    }

    std::size_t shared = 0;
    for (const TripRecord* t : members[l]) shared += t->shared_matched ? 1 : 0;
    p.percent_ridesplitting = p.size == 0 ? 0.0 : 100.0 * static_cast<double>(shared) / static_cast<double>(p.size);
    p.economics = aggregate_economics(members[l]);
    report.clusters.push_back(std::move(p));
  }

  std::vector<const TripRecord*> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = &trips[i];
  report.all_trips = aggregate_economics(all);
  report.sharing = sharing_summary(trips);
  return report;
}

std::vector<LocationShare> top_locations(std::span<const TripRecord> trips, const Assignment& assignment,
                                         std::size_t k, LocationDirection direction, std::size_t top_n) {
  if (assignment.size() != trips.size()) throw DimensionError("assignment length differs from the trip count");
  std::vector<std::map<std::string, std::size_t>> counts(k);
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t i = 0; i < trips.size(); ++i) {
    const ClusterIndex l = assignment[i];
    if (l >= k) throw ParameterError("assignment value outside 0..k-1");
    const std::string& area = direction == LocationDirection::Origin ? trips[i].origin_tract : trips[i].dest_tract;
    ++counts[l][area];
    ++sizes[l];
  }
  std::vector<LocationShare> out;
  for (std::size_t l = 0; l < k; ++l) {
    std::vector<std::pair<std::string, std::size_t>> ranked(counts[l].begin(), counts[l].end());
    // std::map iteration is id-ordered, so a stable sort on count keeps smaller ids first.
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() > top_n) ranked.resize(top_n);
    LocationShare share;
    share.cluster = static_cast<ClusterIndex>(l);
    share.direction = direction;
    for (auto& [area, count] : ranked) {
      share.ranked.emplace_back(area, 100.0 * static_cast<double>(count) / static_cast<double>(sizes[l]));
    }
    out.push_back(std::move(share));
  }
  return out;
}

namespace {

void economics_rows(std::ostream& out, const std::string& prefix, const TripEconomics& e) {
  out << prefix << "derived,dollars_per_mile,USD/mi," << format_double(e.dollars_per_mile) << ",,\n";
  out << prefix << "derived,dollars_per_minute,USD/min," << format_double(e.dollars_per_minute) << ",,\n";
  out << prefix << "derived,avg_speed,mph," << format_double(e.avg_speed_mph) << ",,\n";
  out << prefix << "derived,transit_gap,%," << format_double(e.transit_gap_pct) << ",,\n";
  out << prefix << "derived,metric_trips_excluded,count," << e.excluded << ",,\n";
}

}  // namespace

void write_profile_csv(std::ostream& out, const ProfileReport& report, const std::vector<std::string>& header) {
  for (const auto& line : header) out << "# " << line << '\n';
  out << "# derived metrics are ratios of cluster means: fare/distance, fare/duration, "
         "distance/duration, (transit - duration)/duration\n";
  out << "# pooled_percentile: % of all records strictly below the cluster mean\n";
  out << "cluster,size,share_pct,kind,attribute,unit,value,pooled_percentile,within_cluster_pct\n";
  std::size_t total = 0;
  for (const auto& p : report.clusters) {
    total += p.size;
    const std::string prefix =
        std::to_string(p.cluster) + ',' + std::to_string(p.size) + ',' + format_double(p.share_pct) + ',';
    for (const auto& np : p.numeric) {
      out << prefix << "numeric," << csv::escape(np.name) << ',' << csv::escape(np.unit) << ','
          << format_double(np.mean) << ',' << format_double(np.pooled_percentile) << ",\n";
    }
    for (const auto& cp : p.categorical) {
      out << prefix << "categorical," << csv::escape(cp.name) << ",," << csv::escape(cp.modal_label) << ",,"
          << format_double(cp.within_cluster_pct) << '\n';
    }
    out << prefix << "sharing,percent_ridesplitting,%," << format_double(p.percent_ridesplitting) << ",,\n";
    economics_rows(out, prefix, p.economics);
  }
  const std::string all = "all," + std::to_string(total) + ",100,";
  economics_rows(out, all, report.all_trips);
  out << all << "sharing,shared_authorized,%," << format_double(report.sharing.authorized_pct) << ",,\n";
  out << all << "sharing,matched_given_authorized,%," << format_double(report.sharing.matched_given_authorized_pct)
      << ",,\n";
  out << all << "sharing,pooled,%," << format_double(report.sharing.pooled_pct) << ",,\n";
}

void write_locations_csv(std::ostream& out, std::span<const LocationShare> shares,
                         const std::vector<std::string>& header) {
  for (const auto& line : header) out << "# " << line << '\n';
  out << "cluster,direction,rank,area_id,pct\n";
  for (const auto& s : shares) {
    const char* dir = s.direction == LocationDirection::Origin ? "origin" : "destination";
    for (std::size_t r = 0; r < s.ranked.size(); ++r) {
      out << s.cluster << ',' << dir << ',' << (r + 1) << ',' << csv::escape(s.ranked[r].first) << ','
          << format_double(s.ranked[r].second) << '\n';
    }
  }
}

}  // namespace protoseg
