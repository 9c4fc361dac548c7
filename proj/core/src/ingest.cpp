#include "protoseg/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>

#include "protoseg/csv.hpp"
#include "protoseg/error.hpp"
#include "protoseg/format.hpp"

namespace protoseg {

namespace chr = std::chrono;

namespace {

constexpr std::int64_t kDay = 86400;
constexpr std::size_t kMaxMalformedSamples = 20;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec == std::errc() && res.ptr == s.data() + s.size()) return v;
  // Integral values written with a decimal point, e.g. "3.0".
  const auto d = parse_double(s);
  if (d && std::floor(*d) == *d && std::abs(*d) < 9e15) return static_cast<std::int64_t>(*d);
  return std::nullopt;
}

std::optional<bool> parse_bool(std::string_view s) {
  s = trim(s);
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "true" || lower == "1" || lower == "yes" || lower == "t" || lower == "y") return true;
  if (lower == "false" || lower == "0" || lower == "no" || lower == "f" || lower == "n") return false;
  return std::nullopt;
}

std::optional<int> parse_fixed_int(std::string_view s, std::size_t width) {
  if (s.size() != width) return std::nullopt;
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<chr::year_month_day> make_date(int y, int m, int d) {
  const chr::year_month_day ymd{chr::year{y}, chr::month{static_cast<unsigned>(m)},
                                chr::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return ymd;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open input file " + path.string());
  return in;
}

std::string lowercase(std::string_view s) {
  std::string out(trim(s));
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

LocalTime LocalTime::from_fields(chr::year_month_day date, int hour, int minute, int second) {
  const std::int64_t days = chr::sys_days{date}.time_since_epoch().count();
  return LocalTime(days * kDay + hour * 3600 + minute * 60 + second);
}

std::optional<LocalTime> LocalTime::parse(std::string_view text) {
  text = trim(text);
  // YYYY-MM-DD?HH:MM[:SS]
  if (text.size() != 16 && text.size() != 19) return std::nullopt;
  if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') || text[13] != ':') {
    return std::nullopt;
  }
  const auto y = parse_fixed_int(text.substr(0, 4), 4);
  const auto mo = parse_fixed_int(text.substr(5, 2), 2);
  const auto d = parse_fixed_int(text.substr(8, 2), 2);
  const auto h = parse_fixed_int(text.substr(11, 2), 2);
  const auto mi = parse_fixed_int(text.substr(14, 2), 2);
  std::optional<int> s = 0;
  if (text.size() == 19) {
    if (text[16] != ':') return std::nullopt;
    s = parse_fixed_int(text.substr(17, 2), 2);
  }
  if (!y || !mo || !d || !h || !mi || !s) return std::nullopt;
  if (*h > 23 || *mi > 59 || *s > 59) return std::nullopt;
  const auto date = make_date(*y, *mo, *d);
  if (!date) return std::nullopt;
  return from_fields(*date, *h, *mi, *s);
}

std::optional<LocalTime> LocalTime::parse_portal(std::string_view text) {
  text = trim(text);
  // MM/DD/YYYY hh:mm:ss AM
  if (text.size() != 22 || text[2] != '/' || text[5] != '/' || text[10] != ' ' || text[13] != ':' ||
      text[16] != ':' || text[19] != ' ') {
    return std::nullopt;
  }
  const auto mo = parse_fixed_int(text.substr(0, 2), 2);
  const auto d = parse_fixed_int(text.substr(3, 2), 2);
  const auto y = parse_fixed_int(text.substr(6, 4), 4);
  const auto h = parse_fixed_int(text.substr(11, 2), 2);
  const auto mi = parse_fixed_int(text.substr(14, 2), 2);
  const auto s = parse_fixed_int(text.substr(17, 2), 2);
  const std::string_view ampm = text.substr(20, 2);
  if (!mo || !d || !y || !h || !mi || !s || *h < 1 || *h > 12 || *mi > 59 || *s > 59) return std::nullopt;
  int hour = *h % 12;
  if (ampm == "PM") {
    hour += 12;
  } else if (ampm != "AM") {
    return std::nullopt;
  }
  const auto date = make_date(*y, *mo, *d);
  if (!date) return std::nullopt;
  return from_fields(*date, hour, *mi, *s);
}

chr::sys_days LocalTime::date() const noexcept {
  const std::int64_t days = seconds_ >= 0 ? seconds_ / kDay : -((-seconds_ + kDay - 1) / kDay);
  return chr::sys_days{chr::days{days}};
}

int LocalTime::minute_of_day() const noexcept {
  const std::int64_t in_day = seconds_ - date().time_since_epoch().count() * kDay;
  return static_cast<int>(in_day / 60);
}

int LocalTime::hour() const noexcept { return minute_of_day() / 60; }
int LocalTime::minute() const noexcept { return minute_of_day() % 60; }

unsigned LocalTime::weekday() const noexcept { return chr::weekday{date()}.c_encoding(); }

LocalTime LocalTime::floor_to(std::int64_t granularity_s) const noexcept {
  std::int64_t r = seconds_ % granularity_s;
  if (r < 0) r += granularity_s;
  return LocalTime(seconds_ - r);
}

std::string LocalTime::iso() const {
  const chr::year_month_day ymd{date()};
  const std::int64_t in_day = seconds_ - date().time_since_epoch().count() * kDay;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(in_day / 3600), static_cast<int>(in_day / 60 % 60), static_cast<int>(in_day % 60));
  return buf;
}

std::optional<chr::sys_days> parse_date(std::string_view text) {
  text = trim(text);
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  const auto y = parse_fixed_int(text.substr(0, 4), 4);
  const auto m = parse_fixed_int(text.substr(5, 2), 2);
  const auto d = parse_fixed_int(text.substr(8, 2), 2);
  if (!y || !m || !d) return std::nullopt;
  const auto date = make_date(*y, *m, *d);
  if (!date) return std::nullopt;
  return chr::sys_days{*date};
}

std::string format_date(chr::sys_days day) {
  return LocalTime::from_fields(chr::year_month_day{day}, 0, 0).iso().substr(0, 10);
}

void TripFilter::validate() const {
  if (hour_start < 0 || hour_end > 24 || hour_start >= hour_end) {
    throw ConfigError("hour window must satisfy 0 <= start < end <= 24");
  }
  if (date_from && date_to && *date_from >= *date_to) throw ConfigError("date window is empty");
}

std::vector<TripRecord> apply_filter(std::vector<TripRecord> trips, const TripFilter& filter, LoadReport& report) {
  filter.validate();
  const std::set<chr::sys_days> holidays(filter.holidays.begin(), filter.holidays.end());
  std::vector<TripRecord> kept;
  kept.reserve(trips.size());
  for (auto& t : trips) {
    const auto day = t.pickup.date();
    if ((filter.date_from && day < *filter.date_from) || (filter.date_to && day >= *filter.date_to)) {
      ++report.outside_dates;
    } else if (filter.weekdays_only && t.pickup.is_weekend()) {
      ++report.weekend;
    } else if (holidays.count(day) != 0) {
      ++report.holiday;
    } else if (t.pickup.hour() < filter.hour_start || t.pickup.hour() >= filter.hour_end) {
      ++report.outside_hours;
    } else {
      kept.push_back(std::move(t));
    }
  }
  report.kept = kept.size();
  return kept;
}

namespace {

struct TripColumns {
  std::size_t id, pickup, dropoff, origin, dest, duration, distance, fare, authorized;
  std::optional<std::size_t> matched, parties, pooled;
};

TripColumns trip_columns(const csv::Reader& reader, TripsFormat format) {
  TripColumns c{};
  if (format == TripsFormat::Canonical) {
    c.id = reader.require("trip_id");
    c.pickup = reader.require("pickup_ts");
    c.dropoff = reader.require("dropoff_ts");
    c.origin = reader.require("origin_tract");
    c.dest = reader.require("dest_tract");
    c.duration = reader.require("duration_s");
    c.distance = reader.require("distance_mi");
    c.fare = reader.require("fare_total_usd");
    c.authorized = reader.require("shared_authorized");
    c.matched = reader.require("shared_matched");
    c.parties = reader.require("parties");
  } else {
    c.id = reader.require("Trip ID");
    c.pickup = reader.require("Trip Start Timestamp");
    c.dropoff = reader.require("Trip End Timestamp");
    c.origin = reader.require("Pickup Census Tract");
    c.dest = reader.require("Dropoff Census Tract");
    c.duration = reader.require("Trip Seconds");
    c.distance = reader.require("Trip Miles");
    c.fare = reader.require("Trip Total");
    c.authorized = reader.require("Shared Trip Authorized");
    c.pooled = reader.require("Trips Pooled");
  }
  return c;
}

// Returns an empty string on success, else the rejection reason.
std::string parse_trip(const std::vector<std::string>& row, const TripColumns& c, TripsFormat format,
                       TripRecord& t) {
  const std::size_t needed =
      std::max({c.id, c.pickup, c.dropoff, c.origin, c.dest, c.duration, c.distance, c.fare, c.authorized,
                c.matched.value_or(0), c.parties.value_or(0), c.pooled.value_or(0)});
  if (row.size() <= needed) return "too few fields";

  t.trip_id = std::string(trim(row[c.id]));
  if (t.trip_id.empty()) return "empty trip id";
  const auto parse_ts = format == TripsFormat::Canonical ? &LocalTime::parse : &LocalTime::parse_portal;
  const auto pickup = parse_ts(row[c.pickup]);
  const auto dropoff = parse_ts(row[c.dropoff]);
  if (!pickup || !dropoff) return "bad timestamp";
  t.pickup = *pickup;
  t.dropoff = *dropoff;
  t.origin_tract = std::string(trim(row[c.origin]));
  t.dest_tract = std::string(trim(row[c.dest]));
  const auto duration = parse_double(row[c.duration]);
  const auto distance = parse_double(row[c.distance]);
  const auto fare = parse_double(row[c.fare]);
  const auto authorized = parse_bool(row[c.authorized]);
  if (!duration || !distance || !fare || !authorized) return "bad numeric or boolean field";
  t.duration_s = *duration;
  t.distance_mi = *distance;
  t.fare_usd = *fare;
  t.shared_authorized = *authorized;
  if (format == TripsFormat::Canonical) {
    const auto matched = parse_bool(row[*c.matched]);
    const auto parties = parse_int(row[*c.parties]);
    if (!matched || !parties) return "bad shared_matched or parties";
    t.shared_matched = *matched;
    t.parties = static_cast<int>(*parties);
  } else {
    const auto pooled = parse_int(row[*c.pooled]);
    if (!pooled) return "bad Trips Pooled";
    t.parties = static_cast<int>(std::max<std::int64_t>(*pooled, 1));
    t.shared_matched = *pooled > 1;
  }
  t.minute_after_midnight = t.pickup.minute_of_day();

  if (t.dropoff < t.pickup) return "dropoff before pickup";
  if (!(t.duration_s > 0.0)) return "non-positive duration";
  if (t.distance_mi < 0.0) return "negative distance";
  if (t.fare_usd < 0.0) return "negative fare";
  if (t.parties < 1) return "parties < 1";
  if (t.shared_matched && !t.shared_authorized) return "matched without authorization";
  return {};
}

}  // namespace

std::vector<TripRecord> load_trips(std::istream& in, const TripFilter& filter, LoadReport& report,
                                   TripsFormat format) {
  filter.validate();
  csv::Reader reader(in);
  const TripColumns columns = trip_columns(reader, format);

  std::vector<TripRecord> trips;
  std::vector<std::string> row;
  while (reader.next(row)) {
    ++report.rows_read;
    TripRecord t;
    const std::string reason = parse_trip(row, columns, format, t);
    if (!reason.empty()) {
      ++report.malformed;
      if (report.malformed_samples.size() < kMaxMalformedSamples) {
        report.malformed_samples.push_back("line " + std::to_string(reader.line()) + ": " + reason);
      }
      continue;
    }
    trips.push_back(std::move(t));
  }

  std::stable_sort(trips.begin(), trips.end(),
                   [](const TripRecord& a, const TripRecord& b) { return a.trip_id < b.trip_id; });
  // Later duplicates of a trip id are malformed.
  std::vector<TripRecord> unique;
  unique.reserve(trips.size());
  for (auto& t : trips) {
    if (!unique.empty() && unique.back().trip_id == t.trip_id) {
      ++report.malformed;
      if (report.malformed_samples.size() < kMaxMalformedSamples) {
        report.malformed_samples.push_back("duplicate trip id " + t.trip_id);
      }
      continue;
    }
    unique.push_back(std::move(t));
  }
  return apply_filter(std::move(unique), filter, report);
}

std::vector<TripRecord> load_trips(const std::filesystem::path& path, const TripFilter& filter, LoadReport& report,
                                   TripsFormat format) {
  auto in = open_input(path);
  return load_trips(in, filter, report, format);
}

WeatherTable WeatherTable::load(std::istream& in) {
  csv::Reader reader(in);
  const std::size_t ts = reader.require("ts_hour");
  const std::size_t temp = reader.require("temp_f");
  const std::size_t humidity = reader.require("humidity_pct");
  const std::size_t wind = reader.require("wind_mph");
  const std::size_t rain = reader.require("rain_1h_in");
  const std::size_t snow = reader.require("snow_1h_in");
  const std::size_t condition = reader.require("condition");
  const std::size_t needed = std::max({ts, temp, humidity, wind, rain, snow, condition});

  WeatherTable table;
  std::vector<std::string> row;
  while (reader.next(row)) {
    const std::string where = "weather line " + std::to_string(reader.line());
    if (row.size() <= needed) throw SchemaError(where + ": too few fields");
    WeatherObservation obs;
    const auto hour = LocalTime::parse(row[ts]);
    const auto t = parse_double(row[temp]);
    const auto h = parse_double(row[humidity]);
    const auto w = parse_double(row[wind]);
    if (!hour || !t || !h || !w) throw SchemaError(where + ": bad timestamp or numeric field");
    // Absent precipitation means none fell.
    const auto r = trim(row[rain]).empty() ? std::optional<double>(0.0) : parse_double(row[rain]);
    const auto s = trim(row[snow]).empty() ? std::optional<double>(0.0) : parse_double(row[snow]);
    if (!r || !s) throw SchemaError(where + ": bad precipitation field");
    obs.hour = hour->floor_to(3600);
    obs.temp_f = *t;
    obs.humidity_pct = *h;
    obs.wind_mph = *w;
    obs.rain_1h_in = *r;
    obs.snow_1h_in = *s;
    obs.condition = std::string(trim(row[condition]));
    table.add(std::move(obs));
  }
  return table;
}

WeatherTable WeatherTable::load(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load(in);
}

void WeatherTable::add(WeatherObservation row) {
  row.hour = row.hour.floor_to(3600);
  const std::int64_t key = row.hour.seconds() / 3600;
  const std::string label = row.hour.iso();
  if (!rows_.emplace(key, std::move(row)).second) throw SchemaError("duplicate weather hour " + label);
}

const WeatherObservation* WeatherTable::lookup(LocalTime t, int max_gap_hours) const {
  const std::int64_t key = t.floor_to(3600).seconds() / 3600;
  auto it = rows_.upper_bound(key);
  if (it == rows_.begin()) return nullptr;
  --it;
  if (key - it->first > max_gap_hours) return nullptr;
  return &it->second;
}

WeatherJoinReport join_weather(std::span<TripRecord> trips, const WeatherTable& weather, int max_gap_hours) {
  if (weather.empty()) throw JoinError("weather table is empty");
  WeatherJoinReport report;
  for (auto& t : trips) {
    const WeatherObservation* obs = weather.lookup(t.pickup, max_gap_hours);
    if (obs == nullptr) {
      t.weather.reset();
      ++report.missing;
      continue;
    }
    t.weather = *obs;
    if (obs->hour == t.pickup.floor_to(3600)) {
      ++report.exact;
    } else {
      ++report.filled;
    }
  }
  return report;
}

DayClass day_class(LocalTime t) noexcept { return t.is_weekend() ? DayClass::Weekend : DayClass::Weekday; }

namespace {

std::string od_key(const std::string& origin, const std::string& dest) {
  std::string key = origin;
  key.push_back('\x1f');
  key += dest;
  return key;
}

std::string transit_key(const std::string& origin, const std::string& dest, int bucket, DayClass cls) {
  std::string key = od_key(origin, dest);
  key.push_back('\x1f');
  key += std::to_string(bucket);
  key.push_back(cls == DayClass::Weekday ? 'D' : 'E');
  return key;
}

std::optional<int> parse_bucket(std::string_view text) {
  text = trim(text);
  if (text.size() == 5 && text[2] == ':') {
    const auto h = parse_fixed_int(text.substr(0, 2), 2);
    const auto m = parse_fixed_int(text.substr(3, 2), 2);
    if (!h || !m || *h > 23 || *m > 59) return std::nullopt;
    return *h * 60 + *m;
  }
  const auto minutes = parse_int(text);
  if (!minutes || *minutes < 0 || *minutes >= 1440) return std::nullopt;
  return static_cast<int>(*minutes);
}

}  // namespace

TransitTable TransitTable::load(std::istream& in) {
  csv::Reader reader(in);
  const std::size_t origin = reader.require("origin_tract");
  const std::size_t dest = reader.require("dest_tract");
  const std::size_t bucket = reader.require("depart_bucket");
  const std::size_t dow = reader.require("dow_class");
  const std::size_t time = reader.require("transit_time_s");
  const std::size_t needed = std::max({origin, dest, bucket, dow, time});

  TransitTable table;
  std::vector<std::string> row;
  while (reader.next(row)) {
    const std::string where = "transit line " + std::to_string(reader.line());
    if (row.size() <= needed) throw SchemaError(where + ": too few fields");
    const auto b = parse_bucket(row[bucket]);
    const auto seconds = parse_double(row[time]);
    const std::string cls = lowercase(row[dow]);
    if (!b || *b % 15 != 0) throw SchemaError(where + ": depart_bucket must be HH:MM on a 15-minute boundary");
    if (!seconds || *seconds < 0.0) throw SchemaError(where + ": bad transit_time_s");
    if (cls != "weekday" && cls != "weekend") throw SchemaError(where + ": dow_class must be weekday or weekend");
    try {
      table.add(std::string(trim(row[origin])), std::string(trim(row[dest])), *b,
                cls == "weekday" ? DayClass::Weekday : DayClass::Weekend, *seconds);
    } catch (const SchemaError& e) {
      throw SchemaError(where + ": " + e.what());
    }
  }
  return table;
}

TransitTable TransitTable::load(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load(in);
}

void TransitTable::add(const std::string& origin, const std::string& dest, int bucket_minute, DayClass cls,
                       double seconds) {
  if (!times_.emplace(transit_key(origin, dest, bucket_minute, cls), seconds).second) {
    throw SchemaError("duplicate transit key (" + origin + ", " + dest + ", " + std::to_string(bucket_minute) + ")");
  }
}

std::optional<double> TransitTable::lookup(const std::string& origin, const std::string& dest, int bucket_minute,
                                           DayClass cls) const {
  auto it = times_.find(transit_key(origin, dest, bucket_minute, cls));
  if (it == times_.end()) return std::nullopt;
  return it->second;
}

TransitJoinReport join_transit(std::span<TripRecord> trips, const TransitTable& transit) {
  TransitJoinReport report;
  for (auto& t : trips) {
    const int bucket = t.pickup.minute_of_day() / 15 * 15;
    t.transit_time_s = transit.lookup(t.origin_tract, t.dest_tract, bucket, day_class(t.pickup));
    if (t.transit_time_s) {
      ++report.matched;
    } else {
      ++report.unmatched;
    }
  }
  return report;
}

TaxiTable TaxiTable::load(std::istream& in) {
  csv::Reader reader(in);
  const std::size_t origin = reader.require("origin_tract");
  const std::size_t dest = reader.require("dest_tract");
  const std::size_t trips = reader.require("monthly_trips");
  const std::size_t needed = std::max({origin, dest, trips});

  TaxiTable table;
  std::vector<std::string> row;
  while (reader.next(row)) {
    const std::string where = "taxi line " + std::to_string(reader.line());
    if (row.size() <= needed) throw SchemaError(where + ": too few fields");
    const auto count = parse_int(row[trips]);
    if (!count || *count < 0) throw SchemaError(where + ": bad monthly_trips");
    table.add(std::string(trim(row[origin])), std::string(trim(row[dest])), *count);
  }
  return table;
}

TaxiTable TaxiTable::load(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load(in);
}

void TaxiTable::add(const std::string& origin, const std::string& dest, std::int64_t trips) {
  auto [it, inserted] = counts_.emplace(od_key(origin, dest), trips);
  if (!inserted) {
    it->second += trips;
    ++duplicates_;
  }
}

std::optional<std::int64_t> TaxiTable::lookup(const std::string& origin, const std::string& dest) const {
  auto it = counts_.find(od_key(origin, dest));
  if (it == counts_.end()) return std::nullopt;
  return it->second;
}

TaxiJoinReport join_taxi(std::span<TripRecord> trips, const TaxiTable& taxi) {
  TaxiJoinReport report;
  for (auto& t : trips) {
    const auto count = taxi.lookup(t.origin_tract, t.dest_tract);
    t.taxi_matched = count.has_value();
    t.taxi_monthly_freq = count.value_or(0);
    if (count) {
      ++report.matched;
    } else {
      ++report.unmatched;
    }
  }
  return report;
}

namespace {

struct NumericFeature {
  const char* name;
  const char* unit;
  std::optional<double> (*get)(const TripRecord&);
};

struct CategoricalFeature {
  const char* name;
  std::optional<std::string> (*get)(const TripRecord&);
};

std::optional<double> weather_field(const TripRecord& t, double WeatherObservation::*field) {
  if (!t.weather) return std::nullopt;
  return (*t.weather).*field;
}

const NumericFeature kNumericFeatures[] = {
    {"duration_min", "min", [](const TripRecord& t) -> std::optional<double> { return t.duration_s / 60.0; }},
    {"distance", "mi", [](const TripRecord& t) -> std::optional<double> { return t.distance_mi; }},
    {"fare", "USD", [](const TripRecord& t) -> std::optional<double> { return t.fare_usd; }},
    {"parties", "count", [](const TripRecord& t) -> std::optional<double> { return t.parties; }},
    {"humidity", "%", [](const TripRecord& t) { return weather_field(t, &WeatherObservation::humidity_pct); }},
    {"wind", "mph", [](const TripRecord& t) { return weather_field(t, &WeatherObservation::wind_mph); }},
    {"rain_1h", "in", [](const TripRecord& t) { return weather_field(t, &WeatherObservation::rain_1h_in); }},
    {"temp", "F", [](const TripRecord& t) { return weather_field(t, &WeatherObservation::temp_f); }},
    {"snow_1h", "in", [](const TripRecord& t) { return weather_field(t, &WeatherObservation::snow_1h_in); }},
    {"minute_after_midnight", "min",
     [](const TripRecord& t) -> std::optional<double> { return t.minute_after_midnight; }},
    {"transit_time_min", "min",
     [](const TripRecord& t) -> std::optional<double> {
       if (!t.transit_time_s) return std::nullopt;
       return *t.transit_time_s / 60.0;
     }},
    {"taxi_monthly_freq", "trips/month",
     [](const TripRecord& t) -> std::optional<double> { return static_cast<double>(t.taxi_monthly_freq); }},
};

const char* const kWeekdayNames[] = {"Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"};

const CategoricalFeature kCategoricalFeatures[] = {
    {"shared_matched",
     [](const TripRecord& t) -> std::optional<std::string> { return t.shared_matched ? "true" : "false"; }},
    {"shared_authorized",
     [](const TripRecord& t) -> std::optional<std::string> { return t.shared_authorized ? "true" : "false"; }},
    {"condition",
     [](const TripRecord& t) -> std::optional<std::string> {
       if (!t.weather) return std::nullopt;
       return t.weather->condition;
     }},
    {"origin_tract", [](const TripRecord& t) -> std::optional<std::string> { return t.origin_tract; }},
    {"dest_tract", [](const TripRecord& t) -> std::optional<std::string> { return t.dest_tract; }},
    {"pickup_dow",
     [](const TripRecord& t) -> std::optional<std::string> { return std::string(kWeekdayNames[t.pickup.weekday()]); }},
};

const NumericFeature* find_numeric(std::string_view name) {
  for (const auto& f : kNumericFeatures) {
    if (name == f.name) return &f;
  }
  return nullptr;
}

const CategoricalFeature* find_categorical(std::string_view name) {
  for (const auto& f : kCategoricalFeatures) {
    if (name == f.name) return &f;
  }
  return nullptr;
}

}  // namespace

std::vector<std::string> numeric_feature_names() {
  std::vector<std::string> out;
  for (const auto& f : kNumericFeatures) out.emplace_back(f.name);
  return out;
}

std::vector<std::string> categorical_feature_names() {
  std::vector<std::string> out;
  for (const auto& f : kCategoricalFeatures) out.emplace_back(f.name);
  return out;
}

std::string numeric_feature_unit(std::string_view name) {
  const auto* f = find_numeric(name);
  if (f == nullptr) throw ConfigError("unknown numeric feature '" + std::string(name) + "'");
  return f->unit;
}

std::optional<double> numeric_feature(const TripRecord& trip, std::string_view name) {
  const auto* f = find_numeric(name);
  if (f == nullptr) throw ConfigError("unknown numeric feature '" + std::string(name) + "'");
  return f->get(trip);
}

std::optional<std::string> categorical_feature(const TripRecord& trip, std::string_view name) {
  const auto* f = find_categorical(name);
  if (f == nullptr) throw ConfigError("unknown categorical feature '" + std::string(name) + "'");
  return f->get(trip);
}

FeatureSpec FeatureSpec::defaults() {
  return {{"duration_min", "distance", "fare", "parties", "humidity", "wind", "rain_1h", "minute_after_midnight",
           "transit_time_min", "taxi_monthly_freq"},
          {"shared_matched"},
          true};
}

void FeatureSpec::validate() const {
  if (numeric.empty() && categorical.empty()) throw ConfigError("feature spec selects no features");
  std::set<std::string> seen;
  for (const auto& name : numeric) {
    if (find_numeric(name) == nullptr) throw ConfigError("unknown numeric feature '" + name + "'");
    if (!seen.insert(name).second) throw ConfigError("duplicate feature '" + name + "'");
  }
  for (const auto& name : categorical) {
    if (find_categorical(name) == nullptr) throw ConfigError("unknown categorical feature '" + name + "'");
    if (!seen.insert(name).second) throw ConfigError("duplicate feature '" + name + "'");
  }
}

EncodedTrips to_mixed_dataset(std::span<const TripRecord> trips, const FeatureSpec& spec) {
  spec.validate();
  std::vector<const NumericFeature*> numeric;
  for (const auto& name : spec.numeric) numeric.push_back(find_numeric(name));
  std::vector<const CategoricalFeature*> categorical;
  for (const auto& name : spec.categorical) categorical.push_back(find_categorical(name));

  const std::size_t mr = numeric.size();
  const std::size_t mc = categorical.size();
  std::vector<double> values;
  std::vector<std::string> labels;
  std::vector<std::size_t> rows;
  std::size_t dropped = 0;
  std::vector<double> row_values(mr);
  std::vector<std::string> row_labels(mc);
  for (std::size_t i = 0; i < trips.size(); ++i) {
    bool complete = true;
    for (std::size_t j = 0; j < mr && complete; ++j) {
      const auto v = numeric[j]->get(trips[i]);
      if (!v || !std::isfinite(*v)) {
        complete = false;
      } else {
        row_values[j] = *v;
      }
    }
    for (std::size_t j = 0; j < mc && complete; ++j) {
      auto v = categorical[j]->get(trips[i]);
      if (!v) {
        complete = false;
      } else {
        row_labels[j] = std::move(*v);
      }
    }
    if (!complete) {
      ++dropped;
      continue;
    }
    values.insert(values.end(), row_values.begin(), row_values.end());
    labels.insert(labels.end(), row_labels.begin(), row_labels.end());
    rows.push_back(i);
  }
  const std::size_t n = rows.size();
  if (n == 0) throw EmptyDatasetError("no trip carries every selected feature");

  // Column statistics in original units; constant columns are dropped when standardizing.
  std::vector<std::size_t> keep;
  std::vector<Standardization> transform;
  std::vector<std::string> dropped_constant;
  for (std::size_t j = 0; j < mr; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += values[i * mr + j];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = values[i * mr + j] - mean;
      ss += d * d;
    }
    const double stddev = std::sqrt(ss / static_cast<double>(n));
    if (spec.standardize && !(stddev > 0.0)) {
      dropped_constant.emplace_back(numeric[j]->name);
      continue;
    }
    keep.push_back(j);
    transform.push_back({mean, stddev});
  }
  if (keep.empty() && mc == 0) {
    throw EmptyDatasetError("every selected numeric feature is constant and no categorical feature is selected");
  }

  std::vector<NumericAttribute> num_attrs;
  for (std::size_t j : keep) num_attrs.push_back({numeric[j]->name, numeric[j]->unit});
  std::vector<CategoricalAttribute> cat_attrs;
  for (const auto* f : categorical) cat_attrs.push_back({f->name, {}});
  std::vector<Code> codes(n * mc);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < mc; ++j) codes[i * mc + j] = cat_attrs[j].dictionary.add(labels[i * mc + j]);
  }

  std::optional<std::vector<Standardization>> standardization;
  if (spec.standardize && !keep.empty()) standardization = transform;
  DatasetSchema schema(std::move(num_attrs), std::move(cat_attrs), std::move(standardization));

  std::vector<double> matrix(n * keep.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t jj = 0; jj < keep.size(); ++jj) {
      matrix[i * keep.size() + jj] = schema.to_model(jj, values[i * mr + keep[jj]]);
    }
  }
  return {MixedDataset(std::move(schema), std::move(matrix), std::move(codes)), std::move(rows), dropped,
          std::move(dropped_constant)};
}

EncodedTrips encode_with_schema(std::span<const TripRecord> trips, const DatasetSchema& schema,
                                UnknownPolicy policy) {
  const std::size_t mr = schema.numeric_count();
  const std::size_t mc = schema.categorical_count();
  std::vector<const NumericFeature*> numeric;
  for (const auto& a : schema.numeric()) {
    const auto* f = find_numeric(a.name);
    if (f == nullptr) throw SchemaError("model uses unknown numeric feature '" + a.name + "'");
    numeric.push_back(f);
  }
  std::vector<const CategoricalFeature*> categorical;
  for (const auto& a : schema.categorical()) {
    const auto* f = find_categorical(a.name);
    if (f == nullptr) throw SchemaError("model uses unknown categorical feature '" + a.name + "'");
    categorical.push_back(f);
  }

  std::vector<double> matrix;
  std::vector<Code> codes;
  std::vector<std::size_t> rows;
  std::size_t dropped = 0;
  std::vector<double> row_values(mr);
  std::vector<Code> row_codes(mc);
  for (std::size_t i = 0; i < trips.size(); ++i) {
    bool complete = true;
    for (std::size_t j = 0; j < mr && complete; ++j) {
      const auto v = numeric[j]->get(trips[i]);
      if (!v || !std::isfinite(*v)) {
        complete = false;
      } else {
        row_values[j] = schema.to_model(j, *v);
      }
    }
    for (std::size_t j = 0; j < mc && complete; ++j) {
      const auto v = categorical[j]->get(trips[i]);
      if (!v) {
        complete = false;
        continue;
      }
      row_codes[j] = schema.categorical()[j].dictionary.encode(*v);
      if (row_codes[j] == kUnknownCode && policy == UnknownPolicy::Strict) {
        throw UnknownCategoryError("trip " + trips[i].trip_id + ": unseen category '" + *v + "' for '" +
                                   schema.categorical()[j].name + "'");
      }
    }
    if (!complete) {
      ++dropped;
      continue;
    }
    matrix.insert(matrix.end(), row_values.begin(), row_values.end());
    codes.insert(codes.end(), row_codes.begin(), row_codes.end());
    rows.push_back(i);
  }
  if (rows.empty()) throw EmptyDatasetError("no trip carries every model feature");
  return {MixedDataset(schema, std::move(matrix), std::move(codes)), std::move(rows), dropped, {}};
}

std::vector<NumericSummary> describe_trips(std::span<const TripRecord> trips,
                                           const std::vector<std::string>& features) {
  std::vector<NumericSummary> out;
  for (const auto& name : features) {
    const auto* f = find_numeric(name);
    if (f == nullptr) throw ConfigError("unknown numeric feature '" + name + "'");
    std::vector<double> values;
    for (const auto& t : trips) {
      if (const auto v = f->get(t)) values.push_back(*v);
    }
    NumericSummary s;
    s.name = f->name;
    s.unit = f->unit;
    s.count = values.size();
    if (!values.empty()) {
      double sum = 0.0;
      for (double v : values) sum += v;
      s.mean = sum / static_cast<double>(values.size());
      double ss = 0.0;
      for (double v : values) ss += (v - s.mean) * (v - s.mean);
      s.stddev = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
      std::sort(values.begin(), values.end());
      const std::size_t mid = values.size() / 2;
      s.median = values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

const char* const kEnrichedColumns[] = {
    "trip_id",          "pickup_ts",      "dropoff_ts",     "origin_tract",
    "dest_tract",       "duration_s",     "distance_mi",    "fare_total_usd",
    "shared_authorized", "shared_matched", "parties",        "minute_after_midnight",
    "weather_missing",  "weather_ts",     "temp_f",         "humidity_pct",   "wind_mph",
    "rain_1h_in",       "snow_1h_in",     "condition",      "transit_time_s",
    "taxi_monthly_trips", "taxi_matched",
};

const char* bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

void write_enriched_csv(std::ostream& out, std::span<const TripRecord> trips, const std::vector<std::string>& header) {
  for (const auto& line : header) out << "# " << line << '\n';
  bool first = true;
  for (const char* c : kEnrichedColumns) {
    out << (first ? "" : ",") << c;
    first = false;
  }
  out << '\n';
  for (const auto& t : trips) {
    out << csv::escape(t.trip_id) << ',' << t.pickup.iso() << ',' << t.dropoff.iso() << ','
        << csv::escape(t.origin_tract) << ',' << csv::escape(t.dest_tract) << ',' << format_double(t.duration_s)
        << ',' << format_double(t.distance_mi) << ',' << format_double(t.fare_usd) << ','
        << bool_text(t.shared_authorized) << ',' << bool_text(t.shared_matched) << ',' << t.parties << ','
        << t.minute_after_midnight << ',' << bool_text(!t.weather) << ',';
    if (t.weather) {
      const auto& w = *t.weather;
      out << w.hour.iso() << ',' << format_double(w.temp_f) << ',' << format_double(w.humidity_pct) << ',' << format_double(w.wind_mph)
          << ',' << format_double(w.rain_1h_in) << ',' << format_double(w.snow_1h_in) << ','
          << csv::escape(w.condition) << ',';
    } else {
      out << ",,,,,,,";
    }
    if (t.transit_time_s) out << format_double(*t.transit_time_s);
    out << ',' << t.taxi_monthly_freq << ',' << bool_text(t.taxi_matched) << '\n';
  }
}

std::vector<TripRecord> read_enriched_csv(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::size_t> col;
  for (const char* c : kEnrichedColumns) col.push_back(reader.require(c));
  const std::size_t needed = *std::max_element(col.begin(), col.end());

  std::vector<TripRecord> trips;
  std::vector<std::string> row;
  while (reader.next(row)) {
    const std::string where = "enriched trips line " + std::to_string(reader.line());
    if (row.size() <= needed) throw SchemaError(where + ": too few fields");
    auto field = [&](std::size_t k) -> const std::string& { return row[col[k]]; };
    TripRecord t;
    t.trip_id = field(0);
    const auto pickup = LocalTime::parse(field(1));
    const auto dropoff = LocalTime::parse(field(2));
    const auto duration = parse_double(field(5));
    const auto distance = parse_double(field(6));
    const auto fare = parse_double(field(7));
    const auto authorized = parse_bool(field(8));
    const auto matched = parse_bool(field(9));
    const auto parties = parse_int(field(10));
    const auto minute = parse_int(field(11));
    const auto weather_missing = parse_bool(field(12));
    const auto taxi = parse_int(field(21));
    const auto taxi_matched = parse_bool(field(22));
    if (!pickup || !dropoff || !duration || !distance || !fare || !authorized || !matched || !parties || !minute ||
        !weather_missing || !taxi || !taxi_matched) {
      throw SchemaError(where + ": malformed field");
    }
    t.pickup = *pickup;
    t.dropoff = *dropoff;
    t.origin_tract = field(3);
    t.dest_tract = field(4);
    t.duration_s = *duration;
    t.distance_mi = *distance;
    t.fare_usd = *fare;
    t.shared_authorized = *authorized;
    t.shared_matched = *matched;
    t.parties = static_cast<int>(*parties);
    t.minute_after_midnight = static_cast<int>(*minute);
    if (!*weather_missing) {
      WeatherObservation w;
      const auto temp = parse_double(field(14));
      const auto humidity = parse_double(field(15));
      const auto wind = parse_double(field(16));
      const auto rain = parse_double(field(17));
      const auto snow = parse_double(field(18));
      if (!temp || !humidity || !wind || !rain || !snow) throw SchemaError(where + ": malformed weather field");
      const auto hour = LocalTime::parse(field(13));
      if (!hour) throw SchemaError(where + ": malformed weather_ts");
      w.hour = *hour;
      w.temp_f = *temp;
      w.humidity_pct = *humidity;
      w.wind_mph = *wind;
      w.rain_1h_in = *rain;
      w.snow_1h_in = *snow;
      w.condition = field(19);
      t.weather = std::move(w);
    }
    if (!trim(field(20)).empty()) {
      const auto transit = parse_double(field(20));
      if (!transit) throw SchemaError(where + ": malformed transit_time_s");
      t.transit_time_s = *transit;
    }
    t.taxi_monthly_freq = *taxi;
    t.taxi_matched = *taxi_matched;
    trips.push_back(std::move(t));
  }
  return trips;
}

std::vector<TripRecord> read_enriched_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_enriched_csv(in);
}

}  // namespace protoseg
