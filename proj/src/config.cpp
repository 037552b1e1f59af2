#include "flowdecomp/config.hpp"

#include <set>

#include "flowdecomp/errors.hpp"
#include "flowdecomp/report_io.hpp"

namespace flowdecomp {

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw InvalidArgument("unknown key '" + key + "' in " + where);
  }
}

Vec to_vec(const nlohmann::json& j) {
  const auto values = j.get<std::vector<double>>();
  Vec v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = values[i];
  return v;
}

}  // namespace

RunConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  reject_unknown(j,
                 {"scenario", "params", "x0", "p", "horizon", "step", "substeps",
                  "newton_tolerance", "newton_max_iterations", "det_floor", "seed", "zones",
                  "montecarlo", "decompose"},
                 "config");
  RunConfig c;
  try {
    c.scenario = j.value("scenario", c.scenario);
    if (j.contains("params")) c.params = j.at("params").get<ScenarioParams>();
    if (j.contains("x0")) c.x0 = to_vec(j.at("x0"));
    if (j.contains("p")) c.p = j.at("p").get<int>();
    c.horizon = j.value("horizon", c.horizon);

    auto& in = c.integrator;
    in.step = j.value("step", in.step);
    in.substeps = j.value("substeps", in.substeps);
    in.newton_tolerance = j.value("newton_tolerance", in.newton_tolerance);
    in.newton_max_iterations = j.value("newton_max_iterations", in.newton_max_iterations);
    in.det_floor = j.value("det_floor", in.det_floor);
    in.seed = j.value("seed", in.seed);

    if (j.contains("zones")) {
      const auto& z = j.at("zones");
      reject_unknown(z, {"mode", "delta_red", "delta_green", "rho", "epsilon", "a", "slack"},
                     "zones");
      auto& zc = c.zones;
      if (z.contains("mode")) zc.mode = parse_zone_mode(z.at("mode").get<std::string>());
      zc.delta_red = z.value("delta_red", zc.delta_red);
      zc.delta_green = z.value("delta_green", zc.delta_green);
      zc.rho = z.value("rho", zc.rho);
      zc.epsilon = z.value("epsilon", zc.epsilon);
      zc.a = z.value("a", zc.a);
      zc.slack = z.value("slack", zc.slack);
    }
    c.montecarlo.horizon = c.horizon;
    c.montecarlo.seed_base = in.seed;
    if (j.contains("montecarlo")) {
      const auto& m = j.at("montecarlo");
      reject_unknown(m, {"trials", "seed_base"}, "montecarlo");
      c.montecarlo.trials = m.value("trials", c.montecarlo.trials);
      c.montecarlo.seed_base = m.value("seed_base", c.montecarlo.seed_base);
    }
    if (j.contains("decompose")) {
      const auto& d = j.at("decompose");
      reject_unknown(d, {"times", "points"}, "decompose");
      c.decompose_times = d.value("times", std::vector<double>{});
      if (d.contains("points")) {
        for (const auto& pt : d.at("points")) c.decompose_points.push_back(to_vec(pt));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed config: ") + e.what());
  }
  c.integrator.validate();
  c.zones.validate();
  if (!(c.horizon > 0.0)) throw InvalidArgument("horizon must be positive");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

Scenario build_scenario(const RunConfig& cfg) {
  Scenario s = make_scenario(cfg.scenario, cfg.params);
  if (cfg.x0) {
    if (cfg.x0->size() != s.system.dimension()) {
      throw InvalidArgument("x0 length does not match scenario dimension");
    }
    s.x0 = *cfg.x0;
    s.probe_points.front() = s.x0;
  }
  if (cfg.p) {
    s.split.p = *cfg.p;
    s.split.validate();
  }
  return s;
}

}  // namespace flowdecomp
