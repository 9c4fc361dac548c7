#ifndef PROTOSEG_TOOLS_APP_HPP
#define PROTOSEG_TOOLS_APP_HPP

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "protoseg/fit.hpp"
#include "protoseg/ingest.hpp"

namespace protoseg::app {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kDataError = 3,
  kInfeasibleModel = 4,
};

struct RunConfig {
  std::filesystem::path trips;
  std::filesystem::path weather;
  std::filesystem::path transit;
  std::filesystem::path taxi;
  TripsFormat trips_format = TripsFormat::Canonical;
  int weather_max_gap_hours = 6;

  TripFilter filter;
  FeatureSpec features = FeatureSpec::defaults();
  FitConfig fit;
  std::size_t k_min = 2;
  std::size_t k_max = 14;
  bool nested = true;
  std::size_t top_n = 6;
  bool strict_unknown = false;

  std::filesystem::path out_dir = "out";
  // Empty means the default file inside out_dir.
  std::filesystem::path enriched;
  std::filesystem::path model;
  std::filesystem::path assignments;
  std::filesystem::path input;

  std::filesystem::path enriched_path() const { return enriched.empty() ? out_dir / "enriched_trips.csv" : enriched; }
  std::filesystem::path model_path() const { return model.empty() ? out_dir / "model.json" : model; }
  std::filesystem::path assignments_path() const {
    return assignments.empty() ? out_dir / "assignments.csv" : assignments;
  }

  /// Canonical "key=value" lines of every setting, sorted by key.
  std::string canonical() const;
  /// 16 hex digits of the FNV-1a hash of canonical().
  std::string hash() const;
};

/// Applies a key-value file. Relative paths resolve against the file's
/// directory. Throws ConfigError on unknown keys or bad values.
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value,
                   const std::filesystem::path& base = {});

int cmd_ingest(const RunConfig& cfg, std::ostream& out);
int cmd_elbow(const RunConfig& cfg, std::ostream& out);
int cmd_fit(const RunConfig& cfg, std::ostream& out);
int cmd_profile(const RunConfig& cfg, std::ostream& out);
int cmd_predict(const RunConfig& cfg, std::ostream& out);

/// Full command line entry point; maps protoseg::Error kinds onto exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace protoseg::app

#endif  // PROTOSEG_TOOLS_APP_HPP
