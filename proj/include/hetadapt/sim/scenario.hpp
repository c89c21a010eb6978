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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hetadapt/core/model.hpp"
#include "hetadapt/net/host.hpp"
#include "hetadapt/platform/world.hpp"
#include "hetadapt/qos/config.hpp"

namespace hetadapt::sim {

namespace event {
struct FailLink {
  HostId a, b;
  friend bool operator==(const FailLink&, const FailLink&) = default;
};
struct FailHost {
  HostId host;
  friend bool operator==(const FailHost&, const FailHost&) = default;
};
/// Restores a host (`b` empty) or the link a-b.
struct Restore {
  HostId a;
  std::optional<HostId> b;
  friend bool operator==(const Restore&, const Restore&) = default;
};
struct MoveHost {
  HostId host;
  double x = 0, y = 0;
  friend bool operator==(const MoveHost&, const MoveHost&) = default;
};
struct DrainBattery {
  HostId host;
  double amount = 0;
  friend bool operator==(const DrainBattery&, const DrainBattery&) = default;
};
struct InjectFrame {
  std::string cm;
  HostId host;
  FlowId flow;
  int count = 1;
  int bytes = 64;
  friend bool operator==(const InjectFrame&, const InjectFrame&) = default;
};
/// Global parameter, or a per-host one when `host` is set.
struct SetParam {
  std::string key;
  double value = 0;
  std::optional<HostId> host;
  friend bool operator==(const SetParam&, const SetParam&) = default;
};
}  // namespace event

using EventAction = std::variant<event::FailLink, event::FailHost, event::Restore, event::MoveHost,
                                 event::DrainBattery, event::InjectFrame, event::SetParam>;

std::string_view event_kind(const EventAction& action);

struct ScenarioEvent {
  Tick tick = 0;
  EventAction action;
  friend bool operator==(const ScenarioEvent&, const ScenarioEvent&) = default;
};

struct ScenarioSpec {
  platform::Params params;
  /// Sensor packages are folded into each host's preloaded_repository.
  std::vector<net::Host> hosts;
  std::vector<std::pair<HostId, HostId>> links;
  core::Repository repository;
  std::vector<qos::ConfigurationFamily> families;
  std::string application;
  std::vector<ScenarioEvent> events;

  const qos::ConfigurationFamily& family() const;
  const net::Host* host(const HostId& id) const;
  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// Global keys accepted by set_param without a host.
inline constexpr std::string_view kGlobalParams[] = {"alpha", "beta", "gamma", "hello_miss", "mailbox_capacity",
                                                     "control_bytes", "uc_report_period", "ack_timeout"};
/// Keys accepted by set_param with a host.
inline constexpr std::string_view kHostParams[] = {"memory_capacity", "radio_range"};

/// Parses and validates. Throws ParseError (with line and column),
/// DanglingReference (naming the id) or InvalidValue.
ScenarioSpec parse_scenario(const std::string& text);
ScenarioSpec load_scenario(const std::filesystem::path& path);

/// Cross-reference and value checks on an assembled spec.
void validate(ScenarioSpec& spec);

/// Canonical JSON with every default written out; parse_scenario accepts it.
std::string serialize_scenario(const ScenarioSpec& spec);

}  // namespace hetadapt::sim
