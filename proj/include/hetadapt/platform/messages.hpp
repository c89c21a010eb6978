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
#include <optional>
#include <string>
#include <vector>

#include "hetadapt/common/error.hpp"
#include "hetadapt/core/model.hpp"
#include "hetadapt/net/transport.hpp"
#include "hetadapt/platform/deployment.hpp"
#include "hetadapt/qos/script.hpp"
#include "hetadapt/routing/routing.hpp"

namespace hetadapt::platform {

/// DATA carries conduit frames between endpoint hosts; every other kind is
/// platform control traffic.
enum class MessageKind {
  STATE_REPORT,
  COMMAND,
  CREATE_CONTAINER,
  DESTROY_CONTAINER,
  CREATE_CONDUIT,
  DESTROY_CONDUIT,
  ROUTE_ALERT,
  ROUTE_INFO,
  MIGRATE_UC,
  DATA,
};

std::string_view to_string(MessageKind kind);

/// Last known state of one deported control unit.
struct UcSnapshot {
  std::string subject;
  Side side = Side::none;
  core::StateReport report;
  std::vector<core::ControlCommand> pending;
};

struct PlatformMessage {
  MessageKind kind = MessageKind::STATE_REPORT;
  HostId sender;
  /// Correlates factory/command requests with their acknowledgement.
  std::uint64_t request = 0;

  qos::BoundNode node;
  qos::BoundEdge edge;
  std::optional<HostId> correspondent;
  std::optional<HostId> target_correspondent;
  core::ControlCommand command;
  core::StateReport report;
  /// Set on acknowledgements.
  bool ack = false;
  std::optional<ErrorCode> error;
  std::string error_text;
  routing::RouteNotice notice;
  /// Host expecting the acknowledgement (relayed commands keep it).
  HostId reply_to;
  HostId light_host;
  HostId old_correspondent;
  std::vector<UcSnapshot> snapshots;

  ConduitId conduit;
  std::size_t flow_index = 0;
  core::DataFrame frame;
};

using Envelope = net::Message<PlatformMessage>;

}  // namespace hetadapt::platform
