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

#include "hetadapt/common/log.hpp"
#include "hetadapt/core/components.hpp"
#include "hetadapt/net/clock.hpp"
#include "hetadapt/net/topology.hpp"
#include "hetadapt/net/transport.hpp"
#include "hetadapt/platform/deployment.hpp"
#include "hetadapt/platform/messages.hpp"
#include "hetadapt/qos/config.hpp"
#include "hetadapt/qos/script.hpp"
#include "hetadapt/routing/routing.hpp"

namespace hetadapt::platform {

struct Params {
  net::EnergyParams energy;
  int hello_miss = 2;
  std::size_t mailbox_capacity = 16;
  net::Footprints footprints;
  double control_bytes = 32;
  int uc_report_period = 10;
  int ack_timeout = 20;
  std::uint64_t seed = 0;

  friend bool operator==(const Params&, const Params&) = default;
};

struct FrameCounters {
  std::uint64_t emitted = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::map<std::string, std::uint64_t> dropped_by_reason;
};

struct DeployedPlan {
  DeploymentPlan plan;
  double cm_footprint = 0;
};

/// Everything the platform services act on: hosts and links, routing state,
/// the running component graph, fragment placements and the message carrier.
class World {
 public:
  World(Params params, net::Topology topology, core::Repository repository);
  World(const World&) = delete;
  World& operator=(const World&) = delete;

  Params params;
  net::Topology topology;
  routing::RoutingService routing;
  core::Repository repository;
  core::ComponentTopology components;
  net::Transport<PlatformMessage> transport;
  /// Control messages that reached their destination, waiting for the platform phase.
  net::EventQueue<Envelope> inbox;
  EventLog log;
  Tick tick = 0;
  FrameCounters frames;
  std::map<std::string, DeployedPlan> plans;
  std::map<HostId, HostId> correspondents;
  /// Deported control-unit state, keyed by snapshot_key().
  std::map<std::string, UcSnapshot> uc_snapshots;

  void record(std::string kind, const HostId& host, Details details = {});

  /// Sends a control message and logs it. Local sends land in the inbox
  /// immediately. Returns false if the message was dropped on the spot.
  bool send(const HostId& src, const HostId& dst, PlatformMessage message,
            Priority priority = Priority::normal);

  /// Phase 1: moves every due message one hop; arrivals of DATA are handed
  /// to their conduit's target, control messages go to the inbox.
  void deliver_messages();

  /// Phase 4: runs every PE, hands outputs to conduits, runs every conduit.
  void step_components();

  void drop_frame(const core::DataFrame& frame, std::string_view reason, const std::string& where);
  void deliver_frame(const ConduitId& conduit, std::size_t flow_index, core::DataFrame frame);

  /// Removes a conduit, dropping its buffered and in-flight frames.
  void remove_conduit(const ConduitId& id, std::string_view reason);
  /// Removes a PE, dropping frames still in its output unit.
  void remove_pe(const PeId& id, std::string_view reason);

  void recompute_memory();
  /// Logs per-host energy spent since the previous call and kills light and
  /// sensor hosts whose battery is exhausted.
  void reconcile_energy();
  void kill_host(const HostId& host, std::string_view cause);
  void restore_host(const HostId& host);

  /// Frames emitted but neither delivered nor dropped yet.
  std::uint64_t buffered_frames() const;

  HostSlot slot(const HostId& host) const;
  /// Host whose factories build components for `host`.
  std::optional<HostId> factory_host(const HostId& host) const;
  /// Deployment as it exists in the registry (failed components excluded).
  qos::BoundConfiguration deployed() const;
  qos::ContextSnapshot snapshot(const HostId& supervisor) const;
  bool route_exists(const HostId& from, const HostId& to) const;

  static std::string snapshot_key(const std::string& subject, Side side);

 private:
  std::map<HostId, net::EnergyAccount> reported_energy_;

  void forward_frame(const ConduitId& conduit, std::size_t flow_index, core::DataFrame frame,
                     const HostId& from, const HostId& to);
};

}  // namespace hetadapt::platform
