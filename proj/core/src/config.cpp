#include "raceduel/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace raceduel {

namespace pt = boost::property_tree;

std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> out;
  const std::string trimmed = boost::algorithm::trim_copy(text);
  if (trimmed.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, trimmed, boost::is_any_of(":"));
    if (parts.size() != 3) throw std::invalid_argument("range must be lo:step:hi, got " + text);
    const double lo = std::stod(parts[0]);
    const double step = std::stod(parts[1]);
    const double hi = std::stod(parts[2]);
    if (!(step > 0.0)) throw std::invalid_argument("range step must be positive");
    const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(lo + step * static_cast<double>(i));
    return out;
  }
  std::vector<std::string> parts;
  boost::algorithm::split(parts, trimmed, boost::is_any_of(","));
  for (auto& p : parts) {
    boost::algorithm::trim(p);
    if (!p.empty()) out.push_back(std::stod(p));
  }
  return out;
}

namespace {

template <class T>
void read(const pt::ptree& tree, const std::string& key, T& value) {
  const auto raw = tree.get_optional<std::string>(key);
  if (!raw) return;
  const auto v = tree.get_optional<T>(key);
  if (!v) throw std::runtime_error("config value error: cannot parse " + key + " = '" + *raw + "'");
  value = *v;
}

PredictionMode parse_mode(std::string text) {
  boost::algorithm::to_lower(text);
  if (text == "ch" || text == "constant_heading") return PredictionMode::constant_heading;
  if (text == "clp" || text == "constant_lateral_position") {
    return PredictionMode::constant_lateral_position;
  }
  throw std::invalid_argument("unknown prediction mode '" + text + "'");
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  const std::filesystem::path p(path);
  return p.is_absolute() ? path : (std::filesystem::path(base_dir) / p).string();
}

}  // namespace

PlannerSpec conventional_planner(const RunConfig& config, const std::string& name) {
  if (const auto it = config.presets.find(name); it != config.presets.end()) {
    PlannerSpec spec;
    spec.kind = PlannerKind::conventional;
    spec.name = name;
    spec.weights = it->second;
    return spec;
  }
  return PlannerSpec::conventional(name);
}

RunConfig parse_run_config(std::istream& in, const std::string& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::runtime_error(std::string("config parse error: ") + e.what());
  }

  RunConfig rc;
  ScenarioConfig& sc = rc.scenario;
  const pt::ptree empty;
  const auto section = [&](const std::string& name) -> const pt::ptree& {
    const auto it = tree.find(name);
    return it == tree.not_found() ? empty : it->second;
  };

  try {
    const auto& track = section("track");
    read(track, "length", sc.track.length);
    read(track, "half_width_left", sc.track.half_width_left);
    read(track, "half_width_right", sc.track.half_width_right);

    const auto& vehicle = section("vehicle");
    read(vehicle, "length", sc.geometry.length);
    read(vehicle, "width", sc.geometry.width);
    read(vehicle, "l_r", sc.blocking.l_r);
    read(vehicle, "l_f", sc.blocking.l_f);
    read(vehicle, "max_steering", sc.blocking.max_steering);
    read(vehicle, "max_steering_rate", sc.blocking.max_steering_rate);
    read(vehicle, "v_max", sc.sampling.v_max);
    read(vehicle, "r_min", sc.limits.min_turning_radius);
    sc.sampling.vehicle_width = sc.geometry.width;
    sc.limits.vehicle_width = sc.geometry.width;

    const auto& blocking = section("blocking");
    read(blocking, "k_p", sc.blocking.k_p);
    read(blocking, "k_d", sc.blocking.k_d);
    read(blocking, "k_n", sc.blocking.k_n);
    read(blocking, "s_d", sc.blocking.lookahead);
    if (auto scheme = blocking.get_optional<std::string>("integration")) {
      if (*scheme == "semi-implicit") {
        sc.blocking.scheme = EulerScheme::semi_implicit;
      } else if (*scheme == "explicit") {
        sc.blocking.scheme = EulerScheme::explicit_euler;
      } else {
        throw std::invalid_argument("[blocking] integration must be semi-implicit or explicit");
      }
    }

    const auto& gg = section("gg");
    if (auto table = gg.get_optional<std::string>("table")) {
      sc.limits.gg = GgTable::load_csv(resolve(base_dir, *table));
    } else {
      double lon = 25.0, lat = 25.0;
      read(gg, "a_lon_max", lon);
      read(gg, "a_lat_max", lat);
      sc.limits.gg = GgTable::constant(lon, lat, sc.sampling.v_max);
    }

    const auto& planner = section("planner");
    read(planner, "horizon", sc.sampling.horizon);
    read(planner, "points", sc.sampling.points);
    read(planner, "lateral_samples", sc.sampling.lateral_samples);
    read(planner, "speed_samples", sc.sampling.speed_samples);

    for (const auto& [name, sub] : tree) {
      if (name.rfind("planner.", 0) != 0) continue;
      const std::string preset = name.substr(8);
      CostWeights w = find_preset(preset).value_or(CostWeights{});
      read(sub, "w_n", w.w_n);
      read(sub, "w_v", w.w_v);
      read(sub, "w_pr", w.w_pr);
      read(sub, "p_s", w.p_s);
      read(sub, "p_n", w.p_n);
      if (auto mode = sub.get_optional<std::string>("prediction")) w.mode = parse_mode(*mode);
      w.validate();
      rc.presets[preset] = w;
    }

    const std::string kind = planner.get<std::string>("kind", "conventional");
    const bool safety = planner.get<bool>("safety_layer", false);
    if (auto weights = planner.get_optional<std::string>("weights")) {
      rc.policy_path = resolve(base_dir, *weights);
    }
    if (kind == "conventional") {
      sc.planner = conventional_planner(rc, planner.get<std::string>("preset", "small-ch"));
    } else if (kind == "rl") {
      if (rc.policy_path.empty()) throw std::invalid_argument("[planner] kind=rl needs weights=");
      sc.planner = PlannerSpec::learned(
          std::make_shared<const PolicyWeights>(PolicyWeights::load(rc.policy_path)), safety);
    } else {
      throw std::invalid_argument("unknown planner kind '" + kind + "'");
    }

    const auto& scenario = section("scenario");
    read(scenario, "s_b_init", sc.opponent_gap);
    read(scenario, "n_b_init", sc.opponent_offset);
    read(scenario, "v_init", sc.initial_speed);
    read(scenario, "s_d", sc.blocking.lookahead);

    const auto& grid = section("grid");
    if (auto v = grid.get_optional<std::string>("s_b_init")) rc.grid.gaps = parse_value_list(*v);
    if (auto v = grid.get_optional<std::string>("n_b_init")) rc.grid.offsets = parse_value_list(*v);
    if (auto v = grid.get_optional<std::string>("s_d")) rc.grid.lookaheads = parse_value_list(*v);
    read(grid, "v_init", rc.grid.initial_speed);

    const auto& noise = section("noise");
    read(noise, "mean", sc.noise.mean);
    read(noise, "sigma", sc.noise.stddev);
    read(noise, "seed", sc.noise.seed);

    const auto& sim = section("sim");
    read(sim, "dt", sc.dt);
    read(sim, "replan_interval", sc.replan_interval);
    read(sim, "max_steps", sc.max_steps);
    read(sim, "success_margin", sc.success_margin);
  } catch (const pt::ptree_error& e) {
    throw std::runtime_error(std::string("config value error: ") + e.what());
  }

  sc.validate();
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  const auto parent = std::filesystem::path(path).parent_path();
  return parse_run_config(in, parent.empty() ? "." : parent.string());
}

}  // namespace raceduel
