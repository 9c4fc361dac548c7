#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace protoseg::testing {

namespace fs = std::filesystem;

bool rel_close(double a, double b, double rel, double abs_floor) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= std::max(rel * scale, abs_floor);
}

DatasetSchema make_schema(std::size_t mr, const std::vector<std::size_t>& cards) {
  std::vector<NumericAttribute> numeric;
  for (std::size_t j = 0; j < mr; ++j) numeric.push_back({"x" + std::to_string(j), "u"});
  std::vector<CategoricalAttribute> categorical;
  for (std::size_t j = 0; j < cards.size(); ++j) {
    std::vector<std::string> labels;
    for (std::size_t c = 0; c < cards[j]; ++c) labels.push_back("v" + std::to_string(c));
    categorical.push_back({"c" + std::to_string(j), CategoryDictionary(labels)});
  }
  return DatasetSchema(numeric, categorical);
}

namespace {

MixedRecord random_record(std::mt19937_64& rng, std::size_t mr, const std::vector<std::size_t>& cards,
                          const std::vector<std::vector<double>>& centers) {
  std::normal_distribution<double> noise(0.0, 1.0);
  const auto& center = centers[std::uniform_int_distribution<std::size_t>(0, centers.size() - 1)(rng)];
  MixedRecord r;
  for (std::size_t j = 0; j < mr; ++j) r.numeric.push_back(std::round(2.0 * (center[j] + noise(rng))) / 2.0);
  for (std::size_t card : cards) {
    r.categorical.push_back(static_cast<Code>(std::uniform_int_distribution<std::size_t>(0, card - 1)(rng)));
  }
  return r;
}

std::vector<std::vector<double>> random_centers(std::mt19937_64& rng, std::size_t mr) {
  std::uniform_real_distribution<double> pos(-6.0, 6.0);
  const std::size_t count = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
  std::vector<std::vector<double>> centers(count, std::vector<double>(mr));
  for (auto& c : centers) {
    for (auto& v : c) v = pos(rng);
  }
  return centers;
}

}  // namespace

MixedDataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t mr,
                            const std::vector<std::size_t>& cards) {
  const auto centers = random_centers(rng, mr);
  std::vector<MixedRecord> records;
  for (std::size_t i = 0; i < n; ++i) records.push_back(random_record(rng, mr, cards, centers));
  return MixedDataset::from_records(make_schema(mr, cards), records);
}

MixedDataset random_distinct_dataset(std::mt19937_64& rng, std::size_t n, std::size_t mr,
                                     const std::vector<std::size_t>& cards) {
  const auto centers = random_centers(rng, mr);
  std::vector<MixedRecord> records;
  std::set<std::pair<std::vector<double>, std::vector<Code>>> seen;
  while (records.size() < n) {
    MixedRecord r = random_record(rng, mr, cards, centers);
    if (seen.insert({r.numeric, r.categorical}).second) records.push_back(std::move(r));
  }
  return MixedDataset::from_records(make_schema(mr, cards), records);
}

double partition_cost(const MixedDataset& data, const std::vector<int>& labels, int blocks, double gamma) {
  const std::size_t mr = data.numeric_count();
  const std::size_t mc = data.categorical_count();
  double cost = 0.0;
  for (int b = 0; b < blocks; ++b) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == b) members.push_back(i);
    }
    if (members.empty()) continue;
    for (std::size_t j = 0; j < mr; ++j) {
      double mean = 0.0;
      for (std::size_t i : members) mean += data.numeric(i, j);
      mean /= static_cast<double>(members.size());
      for (std::size_t i : members) cost += (data.numeric(i, j) - mean) * (data.numeric(i, j) - mean);
    }
    for (std::size_t j = 0; j < mc; ++j) {
      std::map<Code, std::size_t> counts;
      for (std::size_t i : members) {
        if (data.categorical(i, j) != kUnknownCode) ++counts[data.categorical(i, j)];
      }
      std::size_t best = 0;
      for (const auto& [code, count] : counts) best = std::max(best, count);
      cost += gamma * static_cast<double>(members.size() - best);
    }
  }
  return cost;
}

namespace {

void enumerate(const MixedDataset& data, std::size_t k, double gamma, std::vector<int>& labels, std::size_t pos,
               int used, double& best) {
  if (pos == labels.size()) {
    best = std::min(best, partition_cost(data, labels, used, gamma));
    return;
  }
  const int limit = std::min<int>(used + 1, static_cast<int>(k));
  for (int b = 0; b < limit; ++b) {
    labels[pos] = b;
    enumerate(data, k, gamma, labels, pos + 1, std::max(used, b + 1), best);
  }
}

}  // namespace

double brute_force_optimum(const MixedDataset& data, std::size_t k, double gamma) {
  std::vector<int> labels(data.size(), 0);
  double best = std::numeric_limits<double>::infinity();
  enumerate(data, k, gamma, labels, 0, 0, best);
  return best;
}

namespace {

double sq(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return s;
}

Assignment nearest(const std::vector<std::vector<double>>& points, const std::vector<std::vector<double>>& centers) {
  Assignment a(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const double d = sq(points[i], centers[c]);
      if (d < best) {
        best = d;
        a[i] = static_cast<ClusterIndex>(c);
      }
    }
  }
  return a;
}

std::vector<std::vector<double>> means(const std::vector<std::vector<double>>& points, const Assignment& a,
                                       std::size_t k, std::vector<std::size_t>& sizes) {
  const std::size_t d = points.empty() ? 0 : points[0].size();
  std::vector<std::vector<double>> c(k, std::vector<double>(d, 0.0));
  sizes.assign(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    ++sizes[a[i]];
    for (std::size_t j = 0; j < d; ++j) c[a[i]][j] += points[i][j];
  }
  for (std::size_t l = 0; l < k; ++l) {
    if (sizes[l] == 0) continue;
    for (auto& v : c[l]) v /= static_cast<double>(sizes[l]);
  }
  return c;
}

}  // namespace

std::vector<Assignment> kmeans_trajectory(const std::vector<std::vector<double>>& points,
                                          std::vector<std::vector<double>> centers, std::size_t max_iter) {
  const std::size_t k = centers.size();
  std::vector<Assignment> out;
  Assignment a = nearest(points, centers);
  out.push_back(a);
  for (std::size_t it = 0; it < max_iter; ++it) {
    std::vector<std::size_t> sizes;
    centers = means(points, a, k, sizes);
    for (;;) {
      const auto empty = std::find(sizes.begin(), sizes.end(), 0);
      if (empty == sizes.end()) break;
      std::size_t victim = points.size();
      double far = -1.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (sizes[a[i]] < 2) continue;
        const double d = sq(points[i], centers[a[i]]);
        if (d > far) {
          far = d;
          victim = i;
        }
      }
      a[victim] = static_cast<ClusterIndex>(empty - sizes.begin());
      centers = means(points, a, k, sizes);
    }
    Assignment next = nearest(points, centers);
    out.push_back(next);
    if (next == a) break;
    a = std::move(next);
  }
  return out;
}

double adjusted_rand_index(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::map<std::pair<std::size_t, std::size_t>, double> table;
  std::map<std::size_t, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  auto pairs = [](double x) { return x * (x - 1.0) / 2.0; };
  double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [key, v] : table) index += pairs(v);
  for (const auto& [key, v] : rows) sum_rows += pairs(v);
  for (const auto& [key, v] : cols) sum_cols += pairs(v);
  const double expected = sum_rows * sum_cols / pairs(static_cast<double>(a.size()));
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

PlantedData planted_clusters(std::size_t groups, std::size_t n, std::uint64_t seed, double separation,
                             double dominance) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t card = groups + 2;
  const std::size_t mr = groups;
  const double arm = separation / std::sqrt(2.0);

  std::vector<double> numeric;
  std::vector<Code> categorical;
  PlantedData out{MixedDataset(make_schema(1, {2}), {0.0, 1.0}, {0, 1}), {}};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t g = i % groups;
    out.labels.push_back(g);
    for (std::size_t j = 0; j < mr; ++j) numeric.push_back((j == g ? arm : 0.0) + noise(rng));
    for (int a = 0; a < 2; ++a) {
      std::size_t code = g;
      if (unit(rng) >= dominance) {
        code = std::uniform_int_distribution<std::size_t>(0, card - 2)(rng);
        if (code >= g) ++code;
      }
      categorical.push_back(static_cast<Code>(code));
    }
  }
  out.data = MixedDataset(make_schema(mr, {card, card}), std::move(numeric), std::move(categorical));
  return out;
}

namespace {

std::string tract(std::size_t i) { return "170310" + std::to_string(81000 + 100 * i); }

std::string stamp(int day, int minute_of_day) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "2018-%02d-%02dT%02d:%02d:00", day > 30 ? 12 : 11, day > 30 ? day - 30 : day,
                minute_of_day / 60, minute_of_day % 60);
  return buf;
}

}  // namespace

CityFixture write_city_fixture(const fs::path& dir, std::uint64_t seed, std::size_t per_segment,
                               std::size_t segments) {
  fs::create_directories(dir);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr std::size_t kTracts = 8;

  // Weekdays of November 2018 (the 1st is a Thursday) except the 22nd and 23rd.
  std::vector<int> weekdays;
  for (int d = 1; d <= 30; ++d) {
    const int dow = (d + 3) % 7;  // 0 = Sunday
    if (dow != 0 && dow != 6 && d != 22 && d != 23) weekdays.push_back(d);
  }

  std::vector<std::string> rows;
  std::size_t id = 0;
  auto trip_row = [&](int day, int minute, std::size_t segment) {
    double axis[3] = {0.0, 0.0, 0.0};
    axis[segment / 2] = segment % 2 == 0 ? 1.0 : -1.0;
    const double duration_min = std::max(1.0, 20.0 + 10.0 * axis[0] + noise(rng));
    const double distance = std::max(0.2, 5.0 + 2.5 * axis[1] + 0.25 * noise(rng));
    const double fare = std::max(2.5, 20.0 + 8.0 * axis[2] + 0.8 * noise(rng));
    const std::size_t o = unit(rng) < 0.6 ? segment : std::uniform_int_distribution<std::size_t>(0, kTracts - 1)(rng);
    const std::size_t d =
        unit(rng) < 0.5 ? (segment + 3) % kTracts : std::uniform_int_distribution<std::size_t>(0, kTracts - 1)(rng);
    const bool authorized = unit(rng) < 0.3;
    const bool matched = authorized && unit(rng) < 0.7;
    const long duration_s = std::lround(duration_min * 60.0);
    const int drop_minute = minute + static_cast<int>((duration_s + 899) / 900) * 15;
    char buf[256];
    std::snprintf(buf, sizeof buf, "T%06zu,%s,%s,%s,%s,%ld,%.2f,%.2f,%s,%s,%d", id++, stamp(day, minute).c_str(),
                  stamp(day + drop_minute / 1440, drop_minute % 1440).c_str(), tract(o).c_str(), tract(d).c_str(),
                  duration_s, distance, fare, authorized ? "true" : "false", matched ? "true" : "false",
                  matched ? 2 : 1);
    rows.emplace_back(buf);
  };

  for (std::size_t s = 0; s < segments; ++s) {
    for (std::size_t t = 0; t < per_segment; ++t) {
      const int day = weekdays[std::uniform_int_distribution<std::size_t>(0, weekdays.size() - 1)(rng)];
      const int minute = 360 + 15 * std::uniform_int_distribution<int>(0, 63)(rng);
      trip_row(day, minute, s);
    }
  }
  // Rows the filters drop: Saturdays, 22:00 pickups, holidays, October.
  for (int i = 0; i < 5; ++i) trip_row(3, 600, static_cast<std::size_t>(i) % segments);
  for (int i = 0; i < 4; ++i) trip_row(5, 1320, static_cast<std::size_t>(i) % segments);
  for (int i = 0; i < 3; ++i) trip_row(22, 600, static_cast<std::size_t>(i) % segments);
  rows.push_back("T" + std::to_string(900000) + ",2018-10-31T12:00:00,2018-10-31T12:15:00," + tract(0) + "," +
                 tract(1) + ",600,2.00,10.00,false,false,1");
  rows.push_back("T900001,not-a-time,2018-11-05T12:15:00," + tract(0) + "," + tract(1) + ",600,2.00,10.00,false,false,1");
  rows.push_back("T900002,2018-11-05T12:00:00,2018-11-05T12:15:00," + tract(0) + "," + tract(1) +
                 ",600,-2.00,10.00,false,false,1");
  std::shuffle(rows.begin(), rows.end(), rng);

  CityFixture fx;
  fx.dir = dir;
  fx.segments = segments;
  fx.kept_trips = segments * per_segment;
  fx.trips = dir / "trips.csv";
  fx.weather = dir / "weather.csv";
  fx.transit = dir / "transit.csv";
  fx.taxi = dir / "taxi.csv";
  fx.config = dir / "city.conf";
  {
    std::ofstream out(fx.trips, std::ios::binary);
    out << "trip_id,pickup_ts,dropoff_ts,origin_tract,dest_tract,duration_s,distance_mi,fare_total_usd,"
           "shared_authorized,shared_matched,parties\n";
    for (const auto& r : rows) out << r << '\n';
  }
  {
    std::ofstream out(fx.weather, std::ios::binary);
    out << "ts_hour,temp_f,humidity_pct,wind_mph,rain_1h_in,snow_1h_in,condition\n";
    const char* conditions[] = {"Clear", "Clouds", "Rain"};
    for (int day = 1; day <= 30; ++day) {
      for (int h = 0; h < 24; ++h) {
        if (day == 12 && h >= 10 && h <= 12) continue;
        const int c = std::uniform_int_distribution<int>(0, 2)(rng);
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s,%.1f,%.0f,%.1f,%s,,%s", stamp(day, h * 60).c_str(),
                      30.0 + 20.0 * unit(rng), 50.0 + 40.0 * unit(rng), 20.0 * unit(rng),
                      c == 2 ? "0.02" : "0", conditions[c]);
        out << buf << '\n';
      }
    }
  }
  {
    std::ofstream out(fx.transit, std::ios::binary);
    out << "origin_tract,dest_tract,depart_bucket,dow_class,transit_time_s\n";
    for (std::size_t o = 0; o < kTracts; ++o) {
      for (std::size_t d = 0; d < kTracts; ++d) {
        for (int b = 0; b < 64; ++b) {
          if ((o + d + static_cast<std::size_t>(b)) % 17 == 0) continue;
          const int minute = 360 + 15 * b;
          char buf[96];
          std::snprintf(buf, sizeof buf, "%s,%s,%02d:%02d,weekday,%d", tract(o).c_str(), tract(d).c_str(),
                        minute / 60, minute % 60,
                        900 + 240 * static_cast<int>(o > d ? o - d : d - o) + 5 * (b % 8));
          out << buf << '\n';
        }
      }
    }
  }
  {
    std::ofstream out(fx.taxi, std::ios::binary);
    out << "origin_tract,dest_tract,monthly_trips\n";
    for (std::size_t o = 0; o < kTracts; ++o) {
      for (std::size_t d = 0; d < kTracts; ++d) {
        out << tract(o) << ',' << tract(d) << ',' << 100 + 37 * o + 11 * d << '\n';
      }
    }
    out << tract(0) << ',' << tract(0) << ",4\n";
  }
  {
    std::ofstream out(fx.config, std::ios::binary);
    out << "; synthetic city, November 2018 weekdays\n"
        << "trips = trips.csv\n"
        << "weather = weather.csv\n"
        << "transit = transit.csv\n"
        << "taxi = taxi.csv\n"
        << "month = 2018-11\n"
        << "weekdays_only = true\n"
        << "holidays = 2018-11-22,2018-11-23\n"
        << "numeric = duration_min,distance,fare\n"
        << "categorical = shared_matched\n"
        << "seed = 7\n"
        << "restarts = 5\n"
        << "k = " << segments << '\n'
        << "k_min = 2\n"
        << "k_max = 14\n";
  }
  return fx;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("protoseg_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace protoseg::testing
