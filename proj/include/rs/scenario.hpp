#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "rs/channel.hpp"
#include "rs/geometry.hpp"
#include "rs/optimizer.hpp"

namespace rs {

// Named RNG streams derived from the master seed, so that deployment, channel
// statistics, data realization, GA attempts and instance transforms consume
// independent sequences.
inline constexpr std::uint64_t kStreamDeployment = 1;
inline constexpr std::uint64_t kStreamStatistics = 2;
inline constexpr std::uint64_t kStreamRealization = 3;
inline constexpr std::uint64_t kStreamInstance = 4;
inline constexpr std::uint64_t kStreamAttemptBase = 10;

struct AdaptabilitySpec {
  enum class Kind { kAddUe, kRemoveUe };
  Kind kind = Kind::kAddUe;
  // Reuse the published study's UE coordinates for the change instead of
  // sampling: "add" inserts that exact position, "remove" drops the nearest
  // UE. Only defined for the named scenario presets.
  bool paper_fidelity = false;
};

struct InstanceChange {
  AdaptabilitySpec::Kind kind = AdaptabilitySpec::Kind::kAddUe;
  int removed_index = -1;
  Eigen::Vector3d added_position = Eigen::Vector3d::Zero();
};

struct ScenarioConfig {
  std::string name = "custom";
  GeometryParams geometry;
  ChannelParams radio;
  GaConfig ga;
  int attempts = 10;
  std::uint64_t seed = 1;
  std::vector<Strategy> strategies{Strategy::kCmrc, Strategy::kCoslp,
                                   Strategy::kSmrc, Strategy::kPmrc};

  // Geometry with the carrier injected from the radio section (single source
  // of truth for the frequency).
  GeometryParams effective_geometry() const;
  void validate() const;
};

bool is_scenario_preset(const std::string& name);
ScenarioConfig scenario_preset(const std::string& name);

// Accepts a preset name or a path to a JSON config file.
ScenarioConfig load_scenario(const std::string& name_or_path);
ScenarioConfig parse_scenario_json(const std::string& text);
std::string scenario_to_json(const ScenarioConfig& cfg);
void save_scenario(const ScenarioConfig& cfg,
                   const std::filesystem::path& path);

// Derives the adaptability instance: pins the base UE placement into the
// config, then adds or removes one UE. The returned change record drives
// warm-start row surgery.
std::pair<ScenarioConfig, InstanceChange> instance_transform(
    const ScenarioConfig& cfg, const AdaptabilitySpec& spec, Rng& rng);

}  // namespace rs
