#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rs/experiment.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "stripesim: uplink AP-UE association optimization on a radio stripe"};

  std::string scenario = "scenario1";
  std::vector<std::string> strategy_names;
  std::uint64_t seed = 0;
  int attempts = 0;
  std::string out_dir = "out";
  std::string warm_path;
  std::string instance;
  bool paper_fidelity = false;

  app.add_option("--scenario", scenario,
                 "preset name (scenario1..scenario4) or JSON config path");
  app.add_option("--strategy", strategy_names,
                 "strategies to run: cmrc, coslp, smrc, pmrc")
      ->delimiter(',');
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  auto* attempts_opt =
      app.add_option("--attempts", attempts, "GA attempts per strategy")
          ->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--warm-start", warm_path,
                 "text matrix seeding each initial population");
  auto* instance_opt =
      app.add_option("--instance", instance,
                     "network change applied before running: add or remove")
          ->check(CLI::IsMember({"add", "remove"}));
  app.add_flag("--paper-fidelity", paper_fidelity,
               "use the published coordinates for --instance")
      ->needs(instance_opt);

  CLI11_PARSE(app, argc, argv);

  try {
    rs::ScenarioConfig cfg = rs::load_scenario(scenario);
    if (*seed_opt) cfg.seed = seed;
    if (*attempts_opt) cfg.attempts = attempts;
    if (!strategy_names.empty()) {
      cfg.strategies.clear();
      for (const std::string& name : strategy_names) {
        const auto s = rs::strategy_from_name(name);
        if (!s) throw std::runtime_error("unknown strategy: " + name);
        cfg.strategies.push_back(*s);
      }
    }
    cfg.validate();

    std::optional<rs::SelectionMatrix> warm;
    if (!warm_path.empty()) {
      warm = rs::SelectionMatrix::from_text(read_file(warm_path),
                                            cfg.geometry.num_aps,
                                            cfg.geometry.num_antennas);
    }

    if (!instance.empty()) {
      rs::AdaptabilitySpec spec;
      spec.kind = instance == "add" ? rs::AdaptabilitySpec::Kind::kAddUe
                                    : rs::AdaptabilitySpec::Kind::kRemoveUe;
      spec.paper_fidelity = paper_fidelity;
      rs::Rng rng = rs::make_rng(cfg.seed, rs::kStreamInstance);
      auto [next, change] = rs::instance_transform(cfg, spec, rng);
      if (warm) {
        warm = change.kind == rs::AdaptabilitySpec::Kind::kAddUe
                   ? warm->with_added_ue()
                   : warm->with_removed_ue(change.removed_index);
      }
      cfg = std::move(next);
    }

    const rs::ExperimentResult result = rs::run_experiment(cfg, warm);
    rs::emit_outputs(result, out_dir);
    rs::save_scenario(result.config,
                      std::filesystem::path(out_dir) / "scenario.json");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
