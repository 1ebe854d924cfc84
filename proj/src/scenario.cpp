#include "rs/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rs {

using nlohmann::json;

GeometryParams ScenarioConfig::effective_geometry() const {
  GeometryParams g = geometry;
  g.carrier_hz = radio.carrier_ghz * 1e9;
  return g;
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("scenario config: " + what);
  };
  if (geometry.side_length_m <= 0.0) fail("geometry.side_length_m must be > 0");
  if (geometry.num_aps < 1) fail("geometry.num_aps must be >= 1");
  if (geometry.num_antennas < 1) fail("geometry.num_antennas must be >= 1");
  if (geometry.num_ues < 0) fail("geometry.num_ues must be >= 0");
  if (geometry.ap_height_m < 0.0 || geometry.ue_height_m < 0.0) {
    fail("heights must be >= 0");
  }
  if (!geometry.fixed_ue_positions.empty() &&
      static_cast<int>(geometry.fixed_ue_positions.size()) != geometry.num_ues) {
    fail("geometry.ue_positions must match geometry.num_ues");
  }
  if (radio.carrier_ghz <= 0.0) fail("radio.carrier_ghz must be > 0");
  if (radio.bandwidth_hz <= 0.0) fail("radio.bandwidth_hz must be > 0");
  if (radio.noise_temperature_k <= 0.0) {
    fail("radio.noise_temperature_k must be > 0");
  }
  if (radio.shadow_variance_db2 < 0.0) {
    fail("radio.shadow_variance_db2 must be >= 0");
  }
  if (radio.shadow_delta < 0.0 || radio.shadow_delta > 1.0) {
    fail("radio.shadow_delta must be in [0, 1]");
  }
  if (radio.shadow_decorr_m <= 0.0) fail("radio.shadow_decorr_m must be > 0");
  if (radio.angle_spread_deg < 0.0) fail("radio.angle_spread_deg must be >= 0");
  if (radio.antenna_spacing_wl <= 0.0) {
    fail("radio.antenna_spacing_wl must be > 0");
  }
  if (radio.tau_c < 1) fail("radio.tau_c must be >= 1");
  if (radio.tau_p < 1 || radio.tau_p > radio.tau_c) {
    fail("radio.tau_p must be in [1, tau_c]");
  }
  if (radio.max_power_mw <= 0.0) fail("radio.max_power_mw must be > 0");
  if (attempts < 1) fail("run.attempts must be >= 1");
  ga.validate();
}

bool is_scenario_preset(const std::string& name) {
  return name == "scenario1" || name == "scenario2" || name == "scenario3" ||
         name == "scenario4";
}

ScenarioConfig scenario_preset(const std::string& name) {
  ScenarioConfig cfg;
  cfg.name = name;
  if (name == "scenario1") {
    cfg.geometry.num_ues = 10;
    cfg.geometry.num_antennas = 4;
    cfg.geometry.num_aps = 12;
    cfg.radio.tau_p = 8;
  } else if (name == "scenario2") {
    cfg.geometry.num_ues = 5;
    cfg.geometry.num_antennas = 2;
    cfg.geometry.num_aps = 8;
    cfg.radio.tau_p = 4;
  } else if (name == "scenario3") {
    cfg.geometry.num_ues = 5;
    cfg.geometry.num_antennas = 4;
    cfg.geometry.num_aps = 12;
    cfg.radio.tau_p = 4;
  } else if (name == "scenario4") {
    cfg.geometry.num_ues = 10;
    cfg.geometry.num_antennas = 2;
    cfg.geometry.num_aps = 8;
    cfg.radio.tau_p = 8;
  } else {
    throw std::invalid_argument("unknown scenario preset: " + name);
  }
  return cfg;
}

namespace {

void reject_unknown_keys(const json& j, const char* section,
                         std::initializer_list<const char*> known) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (item.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw std::invalid_argument("scenario config: unknown key '" +
                                  item.key() + "' in section " + section);
    }
  }
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ScenarioConfig parse_scenario_json(const std::string& text) {
  json j = json::parse(text);
  if (!j.is_object()) {
    throw std::invalid_argument("scenario config: top level must be an object");
  }
  reject_unknown_keys(j, "(top level)", {"name", "geometry", "radio", "ga", "run"});
  ScenarioConfig cfg;
  cfg.strategies.clear();
  maybe(j, "name", cfg.name);
  if (is_scenario_preset(cfg.name)) {
    cfg = scenario_preset(cfg.name);
    cfg.strategies.clear();
  }
  if (j.contains("geometry")) {
    const json& g = j.at("geometry");
    reject_unknown_keys(g, "geometry",
                        {"side_length_m", "num_aps", "num_antennas", "num_ues",
                         "ap_height_m", "ue_height_m", "ue_positions"});
    maybe(g, "side_length_m", cfg.geometry.side_length_m);
    maybe(g, "num_aps", cfg.geometry.num_aps);
    maybe(g, "num_antennas", cfg.geometry.num_antennas);
    maybe(g, "num_ues", cfg.geometry.num_ues);
    maybe(g, "ap_height_m", cfg.geometry.ap_height_m);
    maybe(g, "ue_height_m", cfg.geometry.ue_height_m);
    if (g.contains("ue_positions")) {
      cfg.geometry.fixed_ue_positions.clear();
      for (const auto& p : g.at("ue_positions")) {
        if (!p.is_array() || p.size() != 3) {
          throw std::invalid_argument(
              "scenario config: ue_positions entries must be [x, y, z]");
        }
        cfg.geometry.fixed_ue_positions.emplace_back(
            p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
      }
    }
  }
  if (j.contains("radio")) {
    const json& r = j.at("radio");
    reject_unknown_keys(
        r, "radio",
        {"carrier_ghz", "bandwidth_hz", "noise_figure_db",
         "noise_temperature_k", "shadow_variance_db2", "shadow_delta",
         "shadow_decorr_m", "shadow_distance_m", "angle_spread_deg",
         "antenna_spacing_wl", "tau_c", "tau_p", "max_power_mw"});
    maybe(r, "carrier_ghz", cfg.radio.carrier_ghz);
    maybe(r, "bandwidth_hz", cfg.radio.bandwidth_hz);
    maybe(r, "noise_figure_db", cfg.radio.noise_figure_db);
    maybe(r, "noise_temperature_k", cfg.radio.noise_temperature_k);
    maybe(r, "shadow_variance_db2", cfg.radio.shadow_variance_db2);
    maybe(r, "shadow_delta", cfg.radio.shadow_delta);
    maybe(r, "shadow_decorr_m", cfg.radio.shadow_decorr_m);
    maybe(r, "shadow_distance_m", cfg.radio.shadow_distance_m);
    maybe(r, "angle_spread_deg", cfg.radio.angle_spread_deg);
    maybe(r, "antenna_spacing_wl", cfg.radio.antenna_spacing_wl);
    maybe(r, "tau_c", cfg.radio.tau_c);
    maybe(r, "tau_p", cfg.radio.tau_p);
    maybe(r, "max_power_mw", cfg.radio.max_power_mw);
  }
  if (j.contains("ga")) {
    const json& g = j.at("ga");
    reject_unknown_keys(
        g, "ga",
        {"population", "tournament", "max_generations", "max_stagnant",
         "stagnation_tolerance", "adapt_threshold", "crossover_nominal",
         "crossover_step", "crossover_max", "mutation_nominal", "mutation_step",
         "mutation_max", "sequential_first_loop_double_sum", "parallel_eval"});
    maybe(g, "population", cfg.ga.population);
    maybe(g, "tournament", cfg.ga.tournament);
    maybe(g, "max_generations", cfg.ga.max_generations);
    maybe(g, "max_stagnant", cfg.ga.max_stagnant);
    maybe(g, "stagnation_tolerance", cfg.ga.stagnation_tolerance);
    maybe(g, "adapt_threshold", cfg.ga.adapt_threshold);
    maybe(g, "crossover_nominal", cfg.ga.crossover_nominal);
    maybe(g, "crossover_step", cfg.ga.crossover_step);
    maybe(g, "crossover_max", cfg.ga.crossover_max);
    maybe(g, "mutation_nominal", cfg.ga.mutation_nominal);
    maybe(g, "mutation_step", cfg.ga.mutation_step);
    maybe(g, "mutation_max", cfg.ga.mutation_max);
    maybe(g, "sequential_first_loop_double_sum",
          cfg.ga.sequential_first_loop_double_sum);
    maybe(g, "parallel_eval", cfg.ga.parallel_eval);
  }
  if (j.contains("run")) {
    const json& r = j.at("run");
    reject_unknown_keys(r, "run", {"seed", "attempts", "strategies"});
    maybe(r, "seed", cfg.seed);
    maybe(r, "attempts", cfg.attempts);
    if (r.contains("strategies")) {
      cfg.strategies.clear();
      for (const auto& s : r.at("strategies")) {
        const auto parsed = strategy_from_name(s.get<std::string>());
        if (!parsed) {
          throw std::invalid_argument("scenario config: unknown strategy '" +
                                      s.get<std::string>() + "'");
        }
        cfg.strategies.push_back(*parsed);
      }
    }
  }
  if (cfg.strategies.empty() && !j.contains("run")) {
    cfg.strategies = {Strategy::kCmrc, Strategy::kCoslp, Strategy::kSmrc,
                      Strategy::kPmrc};
  }
  cfg.validate();
  return cfg;
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
  json g{{"side_length_m", cfg.geometry.side_length_m},
         {"num_aps", cfg.geometry.num_aps},
         {"num_antennas", cfg.geometry.num_antennas},
         {"num_ues", cfg.geometry.num_ues},
         {"ap_height_m", cfg.geometry.ap_height_m},
         {"ue_height_m", cfg.geometry.ue_height_m}};
  if (!cfg.geometry.fixed_ue_positions.empty()) {
    json list = json::array();
    for (const auto& p : cfg.geometry.fixed_ue_positions) {
      list.push_back({p.x(), p.y(), p.z()});
    }
    g["ue_positions"] = list;
  }
  json strategies = json::array();
  for (Strategy s : cfg.strategies) strategies.push_back(strategy_name(s));
  json j{
      {"name", cfg.name},
      {"geometry", g},
      {"radio",
       {{"carrier_ghz", cfg.radio.carrier_ghz},
        {"bandwidth_hz", cfg.radio.bandwidth_hz},
        {"noise_figure_db", cfg.radio.noise_figure_db},
        {"noise_temperature_k", cfg.radio.noise_temperature_k},
        {"shadow_variance_db2", cfg.radio.shadow_variance_db2},
        {"shadow_delta", cfg.radio.shadow_delta},
        {"shadow_decorr_m", cfg.radio.shadow_decorr_m},
        {"shadow_distance_m", cfg.radio.shadow_distance_m},
        {"angle_spread_deg", cfg.radio.angle_spread_deg},
        {"antenna_spacing_wl", cfg.radio.antenna_spacing_wl},
        {"tau_c", cfg.radio.tau_c},
        {"tau_p", cfg.radio.tau_p},
        {"max_power_mw", cfg.radio.max_power_mw}}},
      {"ga",
       {{"population", cfg.ga.population},
        {"tournament", cfg.ga.tournament},
        {"max_generations", cfg.ga.max_generations},
        {"max_stagnant", cfg.ga.max_stagnant},
        {"stagnation_tolerance", cfg.ga.stagnation_tolerance},
        {"adapt_threshold", cfg.ga.adapt_threshold},
        {"crossover_nominal", cfg.ga.crossover_nominal},
        {"crossover_step", cfg.ga.crossover_step},
        {"crossover_max", cfg.ga.crossover_max},
        {"mutation_nominal", cfg.ga.mutation_nominal},
        {"mutation_step", cfg.ga.mutation_step},
        {"mutation_max", cfg.ga.mutation_max},
        {"sequential_first_loop_double_sum",
         cfg.ga.sequential_first_loop_double_sum},
        {"parallel_eval", cfg.ga.parallel_eval}}},
      {"run",
       {{"seed", cfg.seed}, {"attempts", cfg.attempts},
        {"strategies", strategies}}}};
  return j.dump(2) + "\n";
}

void save_scenario(const ScenarioConfig& cfg,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_scenario: cannot open " + path.string());
  }
  out << scenario_to_json(cfg);
}

ScenarioConfig load_scenario(const std::string& name_or_path) {
  if (is_scenario_preset(name_or_path)) return scenario_preset(name_or_path);
  std::ifstream in(name_or_path);
  if (!in) {
    throw std::runtime_error(
        "load_scenario: not a preset name and no such file: " + name_or_path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_json(buf.str());
}

namespace {

struct FidelityCoords {
  const char* name;
  Eigen::Vector3d add;
  Eigen::Vector3d remove;
};

const FidelityCoords kFidelity[] = {
    {"scenario1", {6.67, 0.5, 1.0}, {5.14, 19.4, 1.0}},
    {"scenario2", {13.2, 19.5, 1.0}, {14.3, 12.5, 1.0}},
    {"scenario3", {9.55, 11.8, 1.0}, {19.5, 17.6, 1.0}},
    {"scenario4", {8.15, 15.8, 1.0}, {16.6, 15.0, 1.0}},
};

const FidelityCoords& fidelity_for(const std::string& name) {
  for (const auto& f : kFidelity) {
    if (name == f.name) return f;
  }
  throw std::invalid_argument(
      "instance_transform: paper-fidelity coordinates exist only for the "
      "scenario presets, not '" +
      name + "'");
}

}  // namespace

std::pair<ScenarioConfig, InstanceChange> instance_transform(
    const ScenarioConfig& cfg, const AdaptabilitySpec& spec, Rng& rng) {
  cfg.validate();
  const GeometryParams geom = cfg.effective_geometry();
  std::vector<Eigen::Vector3d> positions = geom.fixed_ue_positions;
  std::vector<Eigen::Vector3d> aps = place_aps(geom);
  if (positions.empty() && geom.num_ues > 0) {
    Rng dep_rng = make_rng(cfg.seed, kStreamDeployment);
    positions = build_deployment(geom, dep_rng).ue_positions;
  }

  ScenarioConfig next = cfg;
  InstanceChange change;
  change.kind = spec.kind;
  if (spec.kind == AdaptabilitySpec::Kind::kAddUe) {
    Eigen::Vector3d pos;
    if (spec.paper_fidelity) {
      pos = fidelity_for(cfg.name).add;
      for (const auto& ap : aps) {
        if ((pos - ap).norm() < fraunhofer_distance(geom.num_antennas,
                                                    geom.carrier_hz)) {
          throw std::invalid_argument(
              "instance_transform: fidelity position violates the far-field "
              "limit");
        }
      }
    } else {
      GeometryParams one = geom;
      one.num_ues = 1;
      one.fixed_ue_positions.clear();
      pos = place_ues(one, aps, rng).front();
    }
    positions.push_back(pos);
    change.added_position = pos;
    next.geometry.num_ues = cfg.geometry.num_ues + 1;
  } else {
    if (positions.empty()) {
      throw std::invalid_argument(
          "instance_transform: cannot remove a UE from an empty deployment");
    }
    int index = 0;
    if (spec.paper_fidelity) {
      const Eigen::Vector3d target = fidelity_for(cfg.name).remove;
      double best = std::numeric_limits<double>::infinity();
      for (int k = 0; k < static_cast<int>(positions.size()); ++k) {
        const double d = (positions[k] - target).norm();
        if (d < best) {
          best = d;
          index = k;
        }
      }
    } else {
      std::uniform_int_distribution<int> pick(
          0, static_cast<int>(positions.size()) - 1);
      index = pick(rng);
    }
    positions.erase(positions.begin() + index);
    change.removed_index = index;
    next.geometry.num_ues = cfg.geometry.num_ues - 1;
  }
  next.geometry.fixed_ue_positions = std::move(positions);
  return {std::move(next), change};
}

}  // namespace rs
