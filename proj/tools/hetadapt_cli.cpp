/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "hetadapt/common/error.hpp"
#include "hetadapt/qos/config.hpp"
#include "hetadapt/sim/scenario.hpp"
#include "hetadapt/sim/simulation.hpp"
#include "hetadapt/sim/stats.hpp"

using namespace hetadapt;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kInvalidInput = 1;
constexpr int kRuntimeFailure = 2;

ordered_json to_json(const sim::Summary& s) {
  ordered_json j;
  j["final_config"] = s.final_config ? ordered_json(*s.final_config) : ordered_json(nullptr);
  j["reconfigurations"] = s.reconfigurations;
  j["degraded"] = s.degraded;
  j["ticks"] = s.ticks;
  j["frames"] = {{"emitted", s.emitted}, {"delivered", s.delivered}, {"dropped", s.dropped}, {"buffered", s.buffered}};
  auto energy = ordered_json::object();
  for (const auto& [host, e] : s.energy)
    energy[host] = {{"tx", e.tx}, {"rx", e.rx}, {"cpu", e.cpu}, {"drained", e.drained}, {"total", e.total()}};
  j["energy"] = std::move(energy);
  return j;
}

ordered_json to_json(const qos::Binding& b) {
  ordered_json j;
  j["nodes"] = b.node_hosts;
  j["correspondents"] = b.correspondents;
  return j;
}

std::optional<sim::ScenarioSpec> load(const std::string& path) {
  try {
    return sim::load_scenario(path);
  } catch (const Error& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return std::nullopt;
  }
}

int run_command(const std::string& path, Tick ticks, std::optional<std::uint64_t> seed, const std::string& log_path) {
  auto spec = load(path);
  if (!spec) return kInvalidInput;
  std::ofstream log_file;
  if (!log_path.empty()) {
    log_file.open(log_path);
    if (!log_file) {
      std::cerr << "cannot write " << log_path << "\n";
      return kRuntimeFailure;
    }
  }
  try {
    sim::Simulation simulation(*spec, seed, log_path.empty() ? nullptr : &log_file);
    simulation.world().log.set_retain(false);
    simulation.run(ticks);
    std::cout << to_json(simulation.summary()).dump(2) << "\n";
  } catch (const std::exception& e) {
    std::cerr << "simulation failed: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kOk;
}

int validate_command(const std::string& path) {
  auto spec = load(path);
  if (!spec) return kInvalidInput;
  std::cout << path << ": ok (" << spec->hosts.size() << " hosts, " << spec->family().configurations.size()
            << " configurations, " << spec->events.size() << " events)\n";
  return kOk;
}

int oracle_command(const std::string& path, Tick at) {
  auto spec = load(path);
  if (!spec) return kInvalidInput;
  try {
    sim::Simulation simulation(*spec);
    simulation.world().log.set_retain(false);
    simulation.run(at);
    const auto& family = simulation.platform().family();
    auto context = simulation.world().snapshot(family.supervisor);
    ordered_json out;
    out["tick"] = at;
    auto ranked = ordered_json::array();
    for (const auto& r : qos::rank_configurations(family, context)) {
      ordered_json entry{{"id", r.id}, {"valid", r.valid}};
      if (r.score)
        entry["score"] = {{"qos_level", r.score->qos_level},
                          {"energy_rate", r.score->energy_rate},
                          {"wireless_conduits", r.score->wireless_conduits}};
      if (r.binding) entry["binding"] = to_json(*r.binding);
      if (!r.violations.empty()) entry["violations"] = r.violations;
      ranked.push_back(std::move(entry));
    }
    auto chosen = qos::select(family, context);
    out["selected"] = chosen ? ordered_json(chosen->config->id) : ordered_json(nullptr);
    out["ranking"] = std::move(ranked);
    std::cout << out.dump(2) << "\n";
  } catch (const std::exception& e) {
    std::cerr << "oracle failed: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kOk;
}

int stats_command(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot open " << path << "\n";
    return kInvalidInput;
  }
  try {
    std::cout << sim::render_stats(sim::compute_stats(in));
  } catch (const Error& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return kInvalidInput;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive component platform simulator"};
  app.require_subcommand(1);

  std::string scenario;
  Tick ticks = 200;
  std::optional<std::uint64_t> seed;
  std::string log_path;
  auto* run = app.add_subcommand("run", "Run a scenario and print a summary");
  run->add_option("scenario", scenario, "Scenario file")->required();
  run->add_option("--ticks", ticks, "Number of ticks")->check(CLI::NonNegativeNumber);
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--log", log_path, "Write the event log (JSON lines) here");

  auto* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("scenario", scenario, "Scenario file")->required();

  Tick at = 0;
  auto* oracle = app.add_subcommand("oracle", "Rank every configuration in the context at a tick");
  oracle->add_option("scenario", scenario, "Scenario file")->required();
  oracle->add_option("--tick", at, "Run this many ticks first")->check(CLI::NonNegativeNumber);

  std::string log_file;
  auto* stats = app.add_subcommand("stats", "Summarize an event log");
  stats->add_option("log", log_file, "Log file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInvalidInput;
  }

  if (*run) return run_command(scenario, ticks, seed, log_path);
  if (*validate) return validate_command(scenario);
  if (*oracle) return oracle_command(scenario, at);
  return stats_command(log_file);
}
