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

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include "hetadapt/platform/services.hpp"
#include "hetadapt/platform/world.hpp"
#include "hetadapt/sim/scenario.hpp"

namespace hetadapt::sim {

struct Summary {
  std::optional<std::string> final_config;
  int reconfigurations = 0;
  std::map<HostId, net::EnergyAccount> energy;
  std::uint64_t emitted = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t buffered = 0;
  bool degraded = false;
  Tick ticks = 0;
};

/// Tick loop: message delivery, routing, platform services, components,
/// scenario events, then energy reconciliation.
class Simulation {
 public:
  explicit Simulation(const ScenarioSpec& spec, std::optional<std::uint64_t> seed = std::nullopt,
                      std::ostream* log_sink = nullptr);

  void advance_tick();
  /// Runs until `tick` reaches max_ticks.
  void run(Tick max_ticks);

  platform::World& world() { return *world_; }
  const platform::World& world() const { return *world_; }
  platform::Platform& platform() { return *platform_; }
  const platform::Platform& platform() const { return *platform_; }
  Tick tick() const { return world_->tick; }
  Summary summary() const;

  /// Called after every completed tick with the index of that tick.
  using TickObserver = std::function<void(Tick)>;
  void add_tick_observer(TickObserver observer) { observers_.push_back(std::move(observer)); }

 private:
  void apply_events();
  void apply(const EventAction& action);
  void inject(const event::InjectFrame& inject);
  void set_param(const event::SetParam& param);

  std::unique_ptr<platform::World> world_;
  std::unique_ptr<platform::Platform> platform_;
  std::vector<ScenarioEvent> events_;
  std::size_t next_event_ = 0;
  std::vector<TickObserver> observers_;
};

net::Topology build_topology(const ScenarioSpec& spec);

}  // namespace hetadapt::sim
