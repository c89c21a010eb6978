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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hetadapt/net/topology.hpp"
#include "hetadapt/platform/world.hpp"
#include "hetadapt/qos/config.hpp"
#include "hetadapt/sim/scenario.hpp"

namespace testsupport {

using hetadapt::HostId;
using hetadapt::Tick;

struct GeneratorOptions {
  int max_fixed = 3;
  int max_light = 3;
  int max_sensor = 4;
  int max_configs = 5;
  int events = 6;
  Tick horizon = 120;
  /// No events and batteries that cannot run out.
  bool static_world = false;
};

/// Valid scenario drawn from `seed`: a wired fixed backbone, light and sensor
/// hosts scattered around it, a chain-shaped configuration family and a
/// handful of disturbances.
hetadapt::sim::ScenarioSpec random_scenario(std::uint64_t seed, const GeneratorOptions& options = {});

/// Hop distances from `from` over links that are up between live hosts.
std::map<HostId, int> bfs_hops(const hetadapt::net::Topology& topology, const HostId& from);

/// Largest finite hop distance between two live hosts.
int diameter(const hetadapt::net::Topology& topology);

/// Fragment placements in `world` that break the per-class placement rules.
std::vector<std::string> placement_violations(const hetadapt::platform::World& world);

/// Brute-force validity: tries every node-to-host assignment.
bool exhaustive_valid(const hetadapt::qos::ConfigurationGraph& config, const hetadapt::qos::ContextSnapshot& context);

/// Runs `ticks` ticks and returns the full JSON-lines log.
std::string run_log(const hetadapt::sim::ScenarioSpec& spec, Tick ticks, std::optional<std::uint64_t> seed = {});

/// Converged context for a scenario at tick 0, with no deployment.
hetadapt::qos::ContextSnapshot initial_context(const hetadapt::sim::ScenarioSpec& spec);

}  // namespace testsupport
