#pragma once

// Flat-file outputs.
//
// Time-series CSV: header row, then one row per grid time with columns
//   time, x_1 .. x_n, det, zone, frozen
// numbers printed with 12 significant digits, zone in {green, yellow, red},
// frozen in {0, 1}.
//
// Driver CSV: time, z_0 .. z_m, frozen.
//
// Summaries are JSON objects; see montecarlo_to_json for the report keys.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "flowdecomp/decomp.hpp"
#include "flowdecomp/montecarlo.hpp"
#include "flowdecomp/zones.hpp"

namespace flowdecomp {

struct TimeSeries {
  int dimension = 0;
  std::vector<double> times;
  std::vector<Vec> points;
  std::vector<double> dets;
  std::vector<Zone> zones;
  std::vector<bool> frozen;
};

/// Zones are classified at the level of the freeze interval in force at each
/// time (`times` may be empty).
TimeSeries make_series(const Trajectory& trajectory, const std::vector<double>& dets,
                       const ZoneConfig& zones, const StoppingTimes& times,
                       const std::vector<bool>& frozen);

std::string format_number(double v);
std::string series_csv(const TimeSeries& series);
std::string driver_csv(const FrozenDriver& frozen);

nlohmann::json stopping_times_to_json(const StoppingTimes& times, double horizon);
nlohmann::json decomposition_to_json(const Decomposition& d);
nlohmann::json montecarlo_to_json(const MonteCarloReport& report);
MonteCarloReport montecarlo_from_json(const nlohmann::json& j);

void write_text(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
std::string read_text(const std::filesystem::path& path);

/// Splits a CSV file into rows of raw fields (no quoting support).
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

}  // namespace flowdecomp
