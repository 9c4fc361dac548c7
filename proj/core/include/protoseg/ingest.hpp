#ifndef PROTOSEG_INGEST_HPP
#define PROTOSEG_INGEST_HPP

#include <chrono>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "protoseg/fit.hpp"
#include "protoseg/model.hpp"

namespace protoseg {

/// Local civil (wall-clock) time at one-second resolution. No time zone is
/// attached; every source is read as America/Chicago wall time.
class LocalTime {
 public:
  LocalTime() = default;
  static LocalTime from_fields(std::chrono::year_month_day date, int hour, int minute, int second = 0);

  /// Accepts "YYYY-MM-DD[T| ]HH:MM[:SS]".
  static std::optional<LocalTime> parse(std::string_view text);
  /// Accepts the portal form "MM/DD/YYYY hh:mm:ss AM|PM".
  static std::optional<LocalTime> parse_portal(std::string_view text);

  std::int64_t seconds() const noexcept { return seconds_; }
  std::chrono::sys_days date() const noexcept;
  int hour() const noexcept;
  int minute() const noexcept;
  int minute_of_day() const noexcept;
  /// 0 = Sunday ... 6 = Saturday.
  unsigned weekday() const noexcept;
  bool is_weekend() const noexcept { return weekday() == 0 || weekday() == 6; }

  LocalTime floor_to(std::int64_t granularity_s) const noexcept;
  /// "YYYY-MM-DDTHH:MM:SS"
  std::string iso() const;

  friend auto operator<=>(const LocalTime&, const LocalTime&) = default;

 private:
  explicit LocalTime(std::int64_t s) : seconds_(s) {}
  std::int64_t seconds_ = 0;  // since 1970-01-01T00:00:00 civil
};

std::optional<std::chrono::sys_days> parse_date(std::string_view text);  // "YYYY-MM-DD"
std::string format_date(std::chrono::sys_days day);

struct WeatherObservation {
  LocalTime hour;
  double temp_f = 0.0;
  double humidity_pct = 0.0;
  double wind_mph = 0.0;
  double rain_1h_in = 0.0;
  double snow_1h_in = 0.0;
  std::string condition;
};

/// One trip after filtering and joins. Duration is kept in seconds.
struct TripRecord {
  std::string trip_id;
  LocalTime pickup;
  LocalTime dropoff;
  std::string origin_tract;
  std::string dest_tract;
  double duration_s = 0.0;
  double distance_mi = 0.0;
  double fare_usd = 0.0;
  bool shared_authorized = false;
  bool shared_matched = false;
  int parties = 1;
  int minute_after_midnight = 0;

  std::optional<WeatherObservation> weather;  // absent: weather-missing
  std::optional<double> transit_time_s;
  std::int64_t taxi_monthly_freq = 0;
  bool taxi_matched = false;
};

enum class TripsFormat {
  Canonical,     // trip_id, pickup_ts, ... (see README)
  ChicagoPortal  // "Trip ID", "Trip Start Timestamp", ... of the public export
};

struct TripFilter {
  std::optional<std::chrono::sys_days> date_from;  // inclusive
  std::optional<std::chrono::sys_days> date_to;    // exclusive
  bool weekdays_only = false;
  std::vector<std::chrono::sys_days> holidays;
  int hour_start = 6;   // pickup hour window [hour_start, hour_end)
  int hour_end = 22;

  void validate() const;
};

struct LoadReport {
  std::size_t rows_read = 0;
  std::size_t malformed = 0;
  std::size_t outside_dates = 0;
  std::size_t weekend = 0;
  std::size_t holiday = 0;
  std::size_t outside_hours = 0;
  std::size_t kept = 0;
  std::vector<std::string> malformed_samples;  // "line N: reason", first few only
};

/// Drops trips outside the filter, counting each rejection under its first
/// failing rule (dates, weekend, holiday, hours).
std::vector<TripRecord> apply_filter(std::vector<TripRecord> trips, const TripFilter& filter, LoadReport& report);

/// Parses, validates and filters trips; output is sorted by trip id. Malformed
/// rows are counted and skipped. Throws SchemaError naming a missing column.
std::vector<TripRecord> load_trips(std::istream& in, const TripFilter& filter, LoadReport& report,
                                   TripsFormat format = TripsFormat::Canonical);
std::vector<TripRecord> load_trips(const std::filesystem::path& path, const TripFilter& filter, LoadReport& report,
                                   TripsFormat format = TripsFormat::Canonical);

/// Hourly weather keyed by the hour start (seconds / 3600).
class WeatherTable {
 public:
  static WeatherTable load(std::istream& in);
  static WeatherTable load(const std::filesystem::path& path);
  void add(WeatherObservation row);

  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }
  /// Row for the hour containing `t`, else the most recent earlier row no more
  /// than `max_gap_hours` before it.
  const WeatherObservation* lookup(LocalTime t, int max_gap_hours = 6) const;

 private:
  std::map<std::int64_t, WeatherObservation> rows_;
};

struct WeatherJoinReport {
  std::size_t exact = 0;
  std::size_t filled = 0;   // used an earlier hour within the gap limit
  std::size_t missing = 0;
};

/// Throws JoinError when the table is empty.
WeatherJoinReport join_weather(std::span<TripRecord> trips, const WeatherTable& weather, int max_gap_hours = 6);

enum class DayClass { Weekday, Weekend };
DayClass day_class(LocalTime t) noexcept;

/// Transit travel times keyed by (origin, destination, 15-minute departure
/// bucket, day class). Duplicate keys are rejected at load.
class TransitTable {
 public:
  static TransitTable load(std::istream& in);
  static TransitTable load(const std::filesystem::path& path);
  void add(const std::string& origin, const std::string& dest, int bucket_minute, DayClass cls, double seconds);

  std::size_t size() const noexcept { return times_.size(); }
  std::optional<double> lookup(const std::string& origin, const std::string& dest, int bucket_minute,
                               DayClass cls) const;

 private:
  std::unordered_map<std::string, double> times_;
};

struct TransitJoinReport {
  std::size_t matched = 0;
  std::size_t unmatched = 0;
};

TransitJoinReport join_transit(std::span<TripRecord> trips, const TransitTable& transit);

/// Monthly taxi trip counts per (origin, destination); duplicate rows are summed.
class TaxiTable {
 public:
  static TaxiTable load(std::istream& in);
  static TaxiTable load(const std::filesystem::path& path);
  void add(const std::string& origin, const std::string& dest, std::int64_t trips);

  std::size_t size() const noexcept { return counts_.size(); }
  std::size_t duplicates_summed() const noexcept { return duplicates_; }
  std::optional<std::int64_t> lookup(const std::string& origin, const std::string& dest) const;

 private:
  std::unordered_map<std::string, std::int64_t> counts_;
  std::size_t duplicates_ = 0;
};

struct TaxiJoinReport {
  std::size_t matched = 0;
  std::size_t unmatched = 0;
};

TaxiJoinReport join_taxi(std::span<TripRecord> trips, const TaxiTable& taxi);

struct FeatureSpec {
  std::vector<std::string> numeric;
  std::vector<std::string> categorical;
  bool standardize = true;

  /// Travel time, distance, fare, parties, humidity, wind, rain, minute after
  /// midnight, transit time and taxi frequency; shared_matched as categorical.
  static FeatureSpec defaults();
  /// Throws ConfigError on unknown, duplicate or missing feature names.
  void validate() const;
};

/// Names accepted in FeatureSpec.
std::vector<std::string> numeric_feature_names();
std::vector<std::string> categorical_feature_names();
std::string numeric_feature_unit(std::string_view name);
std::optional<double> numeric_feature(const TripRecord& trip, std::string_view name);
std::optional<std::string> categorical_feature(const TripRecord& trip, std::string_view name);

struct EncodedTrips {
  MixedDataset dataset;
  std::vector<std::size_t> row_to_trip;  // dataset row -> index into the trip span
  std::size_t dropped_missing = 0;       // trips lacking a selected feature
  std::vector<std::string> dropped_constant;  // numeric features removed (stddev 0)
};

/// Builds the clustering matrix. Numeric features are z-standardized (population
/// stddev) when spec.standardize; categorical labels are coded in first-seen
/// order. Throws EmptyDatasetError when no trip carries every feature.
EncodedTrips to_mixed_dataset(std::span<const TripRecord> trips, const FeatureSpec& spec);

/// Encodes trips against an existing schema and its transform. Unseen labels
/// become kUnknownCode, or raise UnknownCategoryError under Strict.
EncodedTrips encode_with_schema(std::span<const TripRecord> trips, const DatasetSchema& schema,
                                UnknownPolicy policy = UnknownPolicy::Lenient);

struct NumericSummary {
  std::string name;
  std::string unit;
  std::size_t count = 0;
  double median = 0.0;
  double mean = 0.0;
  double stddev = 0.0;  // sample
};

/// Median, mean and sample stddev per numeric feature over trips carrying it.
std::vector<NumericSummary> describe_trips(std::span<const TripRecord> trips,
                                           const std::vector<std::string>& features);

/// Enriched trips, one row per trip, for audit and as input to later stages.
void write_enriched_csv(std::ostream& out, std::span<const TripRecord> trips,
                        const std::vector<std::string>& header = {});
std::vector<TripRecord> read_enriched_csv(std::istream& in);
std::vector<TripRecord> read_enriched_csv(const std::filesystem::path& path);

}  // namespace protoseg

#endif  // PROTOSEG_INGEST_HPP
