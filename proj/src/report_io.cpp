#include "flowdecomp/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "flowdecomp/errors.hpp"

namespace flowdecomp {

TimeSeries make_series(const Trajectory& trajectory, const std::vector<double>& dets,
                       const ZoneConfig& zones, const StoppingTimes& times,
                       const std::vector<bool>& frozen) {
  if (dets.size() != trajectory.size() || (!frozen.empty() && frozen.size() != trajectory.size())) {
    throw InvalidArgument("series columns have different lengths");
  }
  TimeSeries s;
  s.dimension = trajectory.empty() ? 0 : static_cast<int>(trajectory.front().point.size());
  for (std::size_t j = 0; j < trajectory.size(); ++j) {
    s.times.push_back(trajectory[j].time);
    s.points.push_back(trajectory[j].point);
    s.dets.push_back(dets[j]);
    s.zones.push_back(zone_of(dets[j], zones, times.active_index(trajectory[j].time) - 1));
    s.frozen.push_back(frozen.empty() ? false : frozen[j]);
  }
  return s;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string series_csv(const TimeSeries& series) {
  std::ostringstream os;
  os << "time";
  for (int i = 1; i <= series.dimension; ++i) os << ",x_" << i;
  os << ",det,zone,frozen\n";
  for (std::size_t j = 0; j < series.times.size(); ++j) {
    os << format_number(series.times[j]);
    for (Eigen::Index i = 0; i < series.points[j].size(); ++i) {
      os << ',' << format_number(series.points[j](i));
    }
    os << ',' << format_number(series.dets[j]) << ',' << to_string(series.zones[j]) << ','
       << (series.frozen[j] ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string driver_csv(const FrozenDriver& frozen) {
  const DriverPath& base = frozen.base();
  std::ostringstream os;
  os << "time";
  for (int i = 0; i <= base.noise_count(); ++i) os << ",z_" << i;
  os << ",frozen\n";
  for (std::size_t j = 0; j < base.size(); ++j) {
    const Vec z = frozen.value_at_grid(j);
    os << format_number(base.grid[j]);
    for (Eigen::Index i = 0; i < z.size(); ++i) os << ',' << format_number(z(i));
    os << ',' << (frozen.frozen_at(base.grid[j]) ? 1 : 0) << '\n';
  }
  return os.str();
}

namespace {

nlohmann::json to_array(const Vec& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

nlohmann::json stopping_times_to_json(const StoppingTimes& times, double horizon) {
  nlohmann::json intervals = nlohmann::json::array();
  for (const auto& iv : times.intervals) {
    nlohmann::json j;
    j["index"] = iv.index;
    j["start"] = iv.start;
    j["end"] = iv.end ? nlohmann::json(*iv.end) : nlohmann::json(nullptr);
    j["open"] = iv.open();
    j["red_threshold"] = iv.red_threshold;
    j["green_threshold"] = iv.green_threshold;
    intervals.push_back(j);
  }
  return {{"horizon", horizon},
          {"intervals", intervals},
          {"freeze_measure", discrepancy_measure(times, horizon)}};
}

nlohmann::json decomposition_to_json(const Decomposition& d) {
  return {{"psi", to_array(d.psi)},
          {"xi", to_array(d.xi)},
          {"vertical_det", d.vertical_det},
          {"residual", d.residual},
          {"orientation", d.orientation}};
}

nlohmann::json montecarlo_to_json(const MonteCarloReport& r) {
  return {{"scenario", r.scenario},
          {"N", r.trials},
          {"horizon", r.horizon},
          {"a", r.a},
          {"epsilon", r.epsilon},
          {"exceedance", r.exceedance},
          {"ci_halfwidth", r.ci_halfwidth},
          {"mean_mu_C", r.mean_mu_c},
          {"max_mu_C", r.max_mu_c},
          {"budget_violations", r.budget_violations},
          {"excluded_trials", r.excluded_trials},
          {"marcus_decomposable_trials", r.marcus_decomposable_trials},
          {"mu_C", r.mu_c},
          {"freeze_counts", r.freeze_counts}};
}

MonteCarloReport montecarlo_from_json(const nlohmann::json& j) {
  MonteCarloReport r;
  try {
    r.scenario = j.at("scenario").get<std::string>();
    r.trials = j.at("N").get<int>();
    r.horizon = j.at("horizon").get<double>();
    r.a = j.at("a").get<double>();
    r.epsilon = j.at("epsilon").get<double>();
    r.exceedance = j.at("exceedance").get<double>();
    r.ci_halfwidth = j.at("ci_halfwidth").get<double>();
    r.mean_mu_c = j.at("mean_mu_C").get<double>();
    r.max_mu_c = j.at("max_mu_C").get<double>();
    r.budget_violations = j.at("budget_violations").get<int>();
    r.excluded_trials = j.at("excluded_trials").get<int>();
    r.marcus_decomposable_trials = j.value("marcus_decomposable_trials", 0);
    r.mu_c = j.value("mu_C", std::vector<double>{});
    r.freeze_counts = j.value("freeze_counts", std::vector<int>{});
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed Monte Carlo report: ") + e.what());
  }
  return r;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open file for writing", path.string());
  os << content;
  if (!os) throw IoError("write failed", path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open file for reading", path.string());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::istringstream is(read_text(path));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> row;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) row.push_back(field);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace flowdecomp
