#include "app.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include "protoseg/csv.hpp"
#include "protoseg/elbow.hpp"
#include "protoseg/error.hpp"
#include "protoseg/format.hpp"
#include "protoseg/model_io.hpp"
#include "protoseg/profile.hpp"

namespace protoseg::app {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const std::string v = trim(value);
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + key + "': cannot parse '" + value + "'");
  }
  return out;
}

bool parse_flag(const std::string& key, const std::string& value) {
  std::string v = trim(value);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + value + "'");
}

std::chrono::sys_days parse_day(const std::string& key, const std::string& value) {
  const auto d = parse_date(value);
  if (!d) throw ConfigError("config key '" + key + "': expected YYYY-MM-DD, got '" + value + "'");
  return *d;
}

fs::path resolve(const fs::path& base, const std::string& value) {
  fs::path p(trim(value));
  if (p.is_relative() && !base.empty()) return base / p;
  return p;
}

std::string output_header(const RunConfig& cfg, const std::string& command) {
  return "protoseg " + command + " schema=" + kModelSchemaVersion + " seed=" + std::to_string(cfg.fit.seed) +
         " config_hash=" + cfg.hash();
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write output file " + path.string());
  return out;
}

void require_file(const fs::path& path, const std::string& what) {
  if (path.empty()) throw ConfigError("no " + what + " path configured");
  if (!fs::exists(path)) throw ConfigError(what + " file not found: " + path.string());
}

const char* init_text(InitMethod m) { return m == InitMethod::PlusPlus ? "plusplus" : "random-records"; }

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value, const fs::path& base) {
  if (key == "trips") {
    cfg.trips = resolve(base, value);
  } else if (key == "weather") {
    cfg.weather = resolve(base, value);
  } else if (key == "transit") {
    cfg.transit = resolve(base, value);
  } else if (key == "taxi") {
    cfg.taxi = resolve(base, value);
  } else if (key == "trips_format") {
    const std::string v = trim(value);
    if (v == "canonical") {
      cfg.trips_format = TripsFormat::Canonical;
    } else if (v == "chicago") {
      cfg.trips_format = TripsFormat::ChicagoPortal;
    } else {
      throw ConfigError("trips_format must be canonical or chicago");
    }
  } else if (key == "weather_max_gap_hours") {
    cfg.weather_max_gap_hours = parse_number<int>(key, value);
  } else if (key == "month") {
    const auto first = parse_date(trim(value) + "-01");
    if (!first) throw ConfigError("config key 'month': expected YYYY-MM, got '" + value + "'");
    const std::chrono::year_month_day ymd{*first};
    cfg.filter.date_from = *first;
    cfg.filter.date_to = std::chrono::sys_days{ymd + std::chrono::months{1}};
  } else if (key == "date_from") {
    cfg.filter.date_from = parse_day(key, value);
  } else if (key == "date_to") {
    cfg.filter.date_to = parse_day(key, value);
  } else if (key == "weekdays_only") {
    cfg.filter.weekdays_only = parse_flag(key, value);
  } else if (key == "holidays") {
    cfg.filter.holidays.clear();
    for (const auto& d : split_list(value)) cfg.filter.holidays.push_back(parse_day(key, d));
  } else if (key == "hour_start") {
    cfg.filter.hour_start = parse_number<int>(key, value);
  } else if (key == "hour_end") {
    cfg.filter.hour_end = parse_number<int>(key, value);
  } else if (key == "numeric") {
    cfg.features.numeric = split_list(value);
  } else if (key == "categorical") {
    cfg.features.categorical = split_list(value);
  } else if (key == "standardize") {
    cfg.features.standardize = parse_flag(key, value);
  } else if (key == "k") {
    cfg.fit.k = parse_number<std::size_t>(key, value);
  } else if (key == "gamma") {
    if (trim(value).empty() || trim(value) == "auto") {
      cfg.fit.gamma.reset();
    } else {
      cfg.fit.gamma = parse_number<double>(key, value);
    }
  } else if (key == "seed") {
    cfg.fit.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "restarts") {
    cfg.fit.restarts = parse_number<std::size_t>(key, value);
  } else if (key == "max_iter") {
    cfg.fit.max_iter = parse_number<std::size_t>(key, value);
  } else if (key == "tol") {
    cfg.fit.tol = parse_number<double>(key, value);
  } else if (key == "init") {
    const std::string v = trim(value);
    if (v == "plusplus") {
      cfg.fit.init = InitMethod::PlusPlus;
    } else if (v == "random-records" || v == "random") {
      cfg.fit.init = InitMethod::RandomRecords;
    } else {
      throw ConfigError("init must be plusplus or random-records");
    }
  } else if (key == "k_min") {
    cfg.k_min = parse_number<std::size_t>(key, value);
  } else if (key == "k_max") {
    cfg.k_max = parse_number<std::size_t>(key, value);
  } else if (key == "nested") {
    cfg.nested = parse_flag(key, value);
  } else if (key == "top_n") {
    cfg.top_n = parse_number<std::size_t>(key, value);
  } else if (key == "strict_unknown") {
    cfg.strict_unknown = parse_flag(key, value);
  } else if (key == "out") {
    cfg.out_dir = resolve(base, value);
  } else if (key == "enriched") {
    cfg.enriched = resolve(base, value);
  } else if (key == "model") {
    cfg.model = resolve(base, value);
  } else if (key == "assignments") {
    cfg.assignments = resolve(base, value);
  } else if (key == "input") {
    cfg.input = resolve(base, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void apply_config_file(RunConfig& cfg, const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config file: ") + e.what());
  }
  const fs::path base = path.parent_path();
  for (const auto& [key, node] : tree) {
    if (!node.empty()) throw ConfigError("config file " + path.string() + ": sections are not supported ('" + key + "')");
    apply_setting(cfg, key, node.data(), base);
  }
}

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["trips"] = trips.generic_string();
  kv["weather"] = weather.generic_string();
  kv["transit"] = transit.generic_string();
  kv["taxi"] = taxi.generic_string();
  kv["trips_format"] = trips_format == TripsFormat::Canonical ? "canonical" : "chicago";
  kv["weather_max_gap_hours"] = std::to_string(weather_max_gap_hours);
  kv["date_from"] = filter.date_from ? format_date(*filter.date_from) : "";
  kv["date_to"] = filter.date_to ? format_date(*filter.date_to) : "";
  kv["weekdays_only"] = filter.weekdays_only ? "true" : "false";
  std::vector<std::string> holidays;
  for (auto d : filter.holidays) holidays.push_back(format_date(d));
  kv["holidays"] = join_list(holidays);
  kv["hour_start"] = std::to_string(filter.hour_start);
  kv["hour_end"] = std::to_string(filter.hour_end);
  kv["numeric"] = join_list(features.numeric);
  kv["categorical"] = join_list(features.categorical);
  kv["standardize"] = features.standardize ? "true" : "false";
  kv["k"] = std::to_string(fit.k);
  kv["gamma"] = fit.gamma ? format_double(*fit.gamma) : "auto";
  kv["seed"] = std::to_string(fit.seed);
  kv["restarts"] = std::to_string(fit.restarts);
  kv["max_iter"] = std::to_string(fit.max_iter);
  kv["tol"] = format_double(fit.tol);
  kv["init"] = init_text(fit.init);
  kv["k_min"] = std::to_string(k_min);
  kv["k_max"] = std::to_string(k_max);
  kv["nested"] = nested ? "true" : "false";
  kv["top_n"] = std::to_string(top_n);
  kv["strict_unknown"] = strict_unknown ? "true" : "false";
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string RunConfig::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int cmd_ingest(const RunConfig& cfg, std::ostream& out) {
  require_file(cfg.trips, "trips");
  require_file(cfg.weather, "weather");
  require_file(cfg.transit, "transit");
  require_file(cfg.taxi, "taxi");

  LoadReport load;
  std::vector<TripRecord> trips = load_trips(cfg.trips, cfg.filter, load, cfg.trips_format);
  const WeatherTable weather = WeatherTable::load(cfg.weather);
  const TransitTable transit = TransitTable::load(cfg.transit);
  const TaxiTable taxi = TaxiTable::load(cfg.taxi);
  const WeatherJoinReport w = join_weather(trips, weather, cfg.weather_max_gap_hours);
  const TransitJoinReport tr = join_transit(trips, transit);
  const TaxiJoinReport tx = join_taxi(trips, taxi);

  const std::string header = output_header(cfg, "ingest");
  {
    auto csv_out = open_output(cfg.enriched_path());
    write_enriched_csv(csv_out, trips, {header});
  }

  std::ostringstream report;
  report << "# " << header << '\n';
  report << "rows_read=" << load.rows_read << '\n'
         << "malformed=" << load.malformed << '\n'
         << "dropped_outside_dates=" << load.outside_dates << '\n'
         << "dropped_weekend=" << load.weekend << '\n'
         << "dropped_holiday=" << load.holiday << '\n'
         << "dropped_outside_hours=" << load.outside_hours << '\n'
         << "trips_kept=" << load.kept << '\n'
         << "weather_rows=" << weather.size() << '\n'
         << "weather_exact=" << w.exact << '\n'
         << "weather_filled=" << w.filled << '\n'
         << "weather_missing=" << w.missing << '\n'
         << "transit_rows=" << transit.size() << '\n'
         << "transit_matched=" << tr.matched << '\n'
         << "transit_unmatched=" << tr.unmatched << '\n'
         << "taxi_pairs=" << taxi.size() << '\n'
         << "taxi_duplicate_rows_summed=" << taxi.duplicates_summed() << '\n'
         << "taxi_matched=" << tx.matched << '\n'
         << "taxi_unmatched=" << tx.unmatched << '\n'
         << "enriched_trips=" << trips.size() << '\n';
  for (const auto& line : load.malformed_samples) report << "malformed_sample=" << line << '\n';
  report << "# feature,unit,count,median,mean,stddev\n";
  for (const auto& s : describe_trips(trips, numeric_feature_names())) {
    report << "summary=" << s.name << ',' << s.unit << ',' << s.count << ',' << format_double(s.median) << ','
           << format_double(s.mean) << ',' << format_double(s.stddev) << '\n';
  }
  {
    auto report_out = open_output(cfg.out_dir / "ingest_report.txt");
    report_out << report.str();
  }

  out << "ingested " << trips.size() << " trips (" << load.rows_read << " rows read, " << load.malformed
      << " malformed)\n";
  if (taxi.duplicates_summed() > 0) {
    out << "warning: " << taxi.duplicates_summed() << " duplicate taxi OD rows were summed\n";
  }
  out << "wrote " << cfg.enriched_path().generic_string() << '\n';
  return kOk;
}

namespace {

EncodedTrips encode_for_fit(const RunConfig& cfg, const std::vector<TripRecord>& trips, std::ostream& out) {
  EncodedTrips enc = to_mixed_dataset(trips, cfg.features);
  for (const auto& name : enc.dropped_constant) {
    out << "warning: numeric feature '" << name << "' is constant and was dropped\n";
  }
  if (enc.dropped_missing > 0) out << "note: " << enc.dropped_missing << " trips lack a selected feature\n";
  return enc;
}

}  // namespace

int cmd_elbow(const RunConfig& cfg, std::ostream& out) {
  if (cfg.k_min < 1 || cfg.k_max < cfg.k_min + 2) {
    throw InsufficientCurveError("k range [" + std::to_string(cfg.k_min) + ", " + std::to_string(cfg.k_max) +
                                 "] gives fewer than 3 curve points");
  }
  require_file(cfg.enriched_path(), "enriched trips");
  const auto trips = read_enriched_csv(cfg.enriched_path());
  const EncodedTrips enc = encode_for_fit(cfg, trips, out);
  const ElbowCurve curve = elbow_scan(enc.dataset, cfg.k_min, cfg.k_max, cfg.fit, cfg.nested);
  const std::size_t k_star = detect_elbow(curve);

  const fs::path path = cfg.out_dir / "elbow.csv";
  {
    auto csv_out = open_output(path);
    write_curve_csv(csv_out, curve,
                    {output_header(cfg, "elbow"), "gamma=" + format_double(curve.gamma) +
                                                      " gamma_source=" + curve.gamma_source,
                     std::string("nested=") + (curve.nested ? "true" : "false") +
                         " recommended_k=" + std::to_string(k_star) + " (max second difference, advisory)"});
  }
  out << "gamma " << format_double(curve.gamma) << " (" << curve.gamma_source << ")\n";
  out << "k,cost\n";
  for (const auto& e : curve.entries) out << e.k << ',' << format_double(e.cost) << '\n';
  out << "recommended k (advisory): " << k_star << '\n';
  out << "wrote " << path.generic_string() << '\n';
  return kOk;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  require_file(cfg.enriched_path(), "enriched trips");
  const auto trips = read_enriched_csv(cfg.enriched_path());
  const EncodedTrips enc = encode_for_fit(cfg, trips, out);
  ClusterModel model = fit(enc.dataset, cfg.fit);
  model.fit_meta.config_hash = cfg.hash();
  save_model(model, cfg.model_path());

  {
    auto csv_out = open_output(cfg.assignments_path());
    csv_out << "# " << output_header(cfg, "fit") << '\n';
    csv_out << "trip_id,cluster\n";
    for (std::size_t i = 0; i < enc.row_to_trip.size(); ++i) {
      csv_out << csv::escape(trips[enc.row_to_trip[i]].trip_id) << ',' << model.assignment[i] << '\n';
    }
  }
  out << "k " << model.k << ", gamma " << format_double(model.gamma) << " (" << model.fit_meta.gamma_source
      << "), cost " << format_double(model.total_cost) << ", converged "
      << (model.fit_meta.converged ? "true" : "false") << '\n';
  if (model.fit_meta.gamma_warning) out << "warning: numeric attributes are constant; gamma set to its floor\n";
  out << "wrote " << cfg.model_path().generic_string() << " and " << cfg.assignments_path().generic_string() << '\n';
  return kOk;
}

namespace {

std::vector<std::pair<std::string, ClusterIndex>> read_assignments(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open assignments file " + path.string());
  csv::Reader reader(in);
  const std::size_t id = reader.require("trip_id");
  const std::size_t cluster = reader.require("cluster");
  std::vector<std::pair<std::string, ClusterIndex>> out;
  std::vector<std::string> row;
  while (reader.next(row)) {
    if (row.size() <= std::max(id, cluster)) throw SchemaError("assignments: too few fields");
    ClusterIndex c = 0;
    const auto& text = row[cluster];
    const auto res = std::from_chars(text.data(), text.data() + text.size(), c);
    if (res.ec != std::errc()) throw SchemaError("assignments: bad cluster id '" + text + "'");
    out.emplace_back(row[id], c);
  }
  return out;
}

}  // namespace

int cmd_profile(const RunConfig& cfg, std::ostream& out) {
  require_file(cfg.model_path(), "model");
  require_file(cfg.enriched_path(), "enriched trips");
  require_file(cfg.assignments_path(), "assignments");
  const ClusterModel model = load_model(cfg.model_path());
  const auto trips = read_enriched_csv(cfg.enriched_path());
  const auto assigned = read_assignments(cfg.assignments_path());
  const EncodedTrips enc = encode_with_schema(trips, model.schema);

  if (enc.row_to_trip.size() != assigned.size() || assigned.size() != model.assignment.size()) {
    throw SchemaError("trip id set mismatch: model has " + std::to_string(model.assignment.size()) +
                      " assignments, assignments file " + std::to_string(assigned.size()) + ", enriched trips " +
                      std::to_string(enc.row_to_trip.size()));
  }
  std::vector<TripRecord> aligned;
  aligned.reserve(assigned.size());
  for (std::size_t i = 0; i < assigned.size(); ++i) {
    const TripRecord& t = trips[enc.row_to_trip[i]];
    if (t.trip_id != assigned[i].first || model.assignment[i] != assigned[i].second) {
      throw SchemaError("trip id set mismatch at row " + std::to_string(i) + " (trip " + t.trip_id + ")");
    }
    aligned.push_back(t);
  }

  const ProfileReport report = profile_clusters(enc.dataset, model, aligned);
  std::vector<LocationShare> shares = top_locations(aligned, model.assignment, model.k, LocationDirection::Origin,
                                                    cfg.top_n);
  for (auto& s : top_locations(aligned, model.assignment, model.k, LocationDirection::Destination, cfg.top_n)) {
    shares.push_back(std::move(s));
  }

  const std::string header = output_header(cfg, "profile") + " model_seed=" + std::to_string(model.fit_meta.seed) +
                             " model_config_hash=" + model.fit_meta.config_hash;
  {
    auto p = open_output(cfg.out_dir / "profile.csv");
    write_profile_csv(p, report, {header});
  }
  {
    auto l = open_output(cfg.out_dir / "locations.csv");
    write_locations_csv(l, shares, {header});
  }
  double share_sum = 0.0;
  for (const auto& c : report.clusters) {
    share_sum += c.share_pct;
    out << "cluster " << c.cluster << ": " << format_fixed(c.share_pct, 2) << "% of trips, ridesplitting "
        << format_fixed(c.percent_ridesplitting, 2) << "%\n";
  }
  out << "shares sum to " << format_fixed(share_sum, 2) << "%\n";
  out << "wrote " << (cfg.out_dir / "profile.csv").generic_string() << " and "
      << (cfg.out_dir / "locations.csv").generic_string() << '\n';
  return kOk;
}

int cmd_predict(const RunConfig& cfg, std::ostream& out) {
  require_file(cfg.model_path(), "model");
  const fs::path input = cfg.input.empty() ? cfg.enriched_path() : cfg.input;
  require_file(input, "input trips");
  const ClusterModel model = load_model(cfg.model_path());
  const auto trips = read_enriched_csv(input);
  const UnknownPolicy policy = cfg.strict_unknown ? UnknownPolicy::Strict : UnknownPolicy::Lenient;
  const EncodedTrips enc = encode_with_schema(trips, model.schema, policy);

  const fs::path path = cfg.out_dir / "predictions.csv";
  auto csv_out = open_output(path);
  csv_out << "# " << output_header(cfg, "predict") << '\n';
  csv_out << "trip_id,cluster\n";
  for (std::size_t i = 0; i < enc.row_to_trip.size(); ++i) {
    csv_out << csv::escape(trips[enc.row_to_trip[i]].trip_id) << ','
            << predict(model, enc.dataset.record(i), policy) << '\n';
  }
  out << "predicted " << enc.row_to_trip.size() << " trips";
  if (enc.dropped_missing > 0) out << " (" << enc.dropped_missing << " lacked a model feature)";
  out << "\nwrote " << path.generic_string() << '\n';
  return kOk;
}

namespace {

struct Overrides {
  std::string config;
  std::optional<std::size_t> k, restarts, max_iter, k_min, k_max;
  std::optional<double> gamma;
  std::optional<std::uint64_t> seed;
  bool no_standardize = false;
  bool strict = false;
  std::optional<std::string> out, model, input;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "Key-value config file");
  sub->add_option("--k", o.k, "Number of prototypes");
  sub->add_option("--gamma", o.gamma, "Categorical weight (estimated when omitted)");
  sub->add_option("--seed", o.seed, "Random seed");
  sub->add_option("--restarts", o.restarts, "Restarts per fit");
  sub->add_option("--max-iter", o.max_iter, "Iteration cap per restart");
  sub->add_option("--k-min", o.k_min, "Smallest k of the elbow scan");
  sub->add_option("--k-max", o.k_max, "Largest k of the elbow scan");
  sub->add_flag("--no-standardize", o.no_standardize, "Keep numeric features in original units");
  sub->add_option("--out", o.out, "Output directory");
}

RunConfig resolve_config(const Overrides& o) {
  RunConfig cfg;
  if (!o.config.empty()) apply_config_file(cfg, o.config);
  if (o.k) cfg.fit.k = *o.k;
  if (o.gamma) cfg.fit.gamma = *o.gamma;
  if (o.seed) cfg.fit.seed = *o.seed;
  if (o.restarts) cfg.fit.restarts = *o.restarts;
  if (o.max_iter) cfg.fit.max_iter = *o.max_iter;
  if (o.k_min) cfg.k_min = *o.k_min;
  if (o.k_max) cfg.k_max = *o.k_max;
  if (o.no_standardize) cfg.features.standardize = false;
  if (o.out) cfg.out_dir = *o.out;
  if (o.model) cfg.model = *o.model;
  if (o.input) cfg.input = *o.input;
  if (o.strict) cfg.strict_unknown = true;
  return cfg;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"protoseg: K-prototypes segmentation of ridesourcing trips"};
  app.require_subcommand(1);
  Overrides o;
  auto* ingest = app.add_subcommand("ingest", "Filter trips and join weather, transit and taxi data");
  auto* elbow = app.add_subcommand("elbow", "Scan k and report the cost curve");
  auto* fit_cmd = app.add_subcommand("fit", "Fit a K-prototypes model");
  auto* profile = app.add_subcommand("profile", "Summarize the clusters of a fitted model");
  auto* predict_cmd = app.add_subcommand("predict", "Assign trips to the prototypes of a fitted model");
  for (auto* sub : {ingest, elbow, fit_cmd, profile, predict_cmd}) add_common(sub, o);
  for (auto* sub : {profile, predict_cmd}) sub->add_option("--model", o.model, "Model JSON path");
  predict_cmd->add_option("--input", o.input, "Enriched trips CSV to classify");
  predict_cmd->add_flag("--strict", o.strict, "Fail on categories unseen at fit time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    const RunConfig cfg = resolve_config(o);
    if (ingest->parsed()) return cmd_ingest(cfg, out);
    if (elbow->parsed()) return cmd_elbow(cfg, out);
    if (fit_cmd->parsed()) return cmd_fit(cfg, out);
    if (profile->parsed()) return cmd_profile(cfg, out);
    return cmd_predict(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::Config:
        return kConfigError;
      case ErrorKind::Data:
        return kDataError;
      case ErrorKind::Infeasible:
        return kInfeasibleModel;
    }
    return kDataError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace protoseg::app
