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

#include <optional>
#include <string>

#include "hetadapt/platform/world.hpp"

namespace hetadapt::platform {

/// How the container hands frames to its CM.
enum class Adapter { push_on_arrival, method_call, mailbox };
std::string_view to_string(Adapter adapter);
Adapter adapter_for(core::InteractionStyle style);

struct ContainerSpec {
  std::string cm;
  HostId host;
  /// Correspondent taking the deported UC when `host` is light.
  std::optional<HostId> correspondent;
};

struct ConduitSpec {
  qos::BoundEdge edge;
  std::optional<HostId> source_correspondent;
  std::optional<HostId> target_correspondent;
};

/// Builds a PE per its deployment plan and registers it in `created` state.
/// Throws UnknownDescriptor, ClosedWorldViolation, CapabilityMismatch,
/// CapacityExceeded, NoCorrespondent or UnknownEntity (host down or absent).
PeId build_container(World& world, const ContainerSpec& spec);

/// Connects the two PEs of `spec.edge` through a new conduit. Throws
/// UnknownEndpoint, NoRoute, CapacityExceeded, NoCorrespondent, PortBusy.
ConduitId build_conduit(World& world, const ConduitSpec& spec);

/// Idempotent removals; frames still held are dropped with reason
/// `conduit_destroyed` / `container_destroyed`.
void destroy_container(World& world, const PeId& id);
void destroy_conduit(World& world, const ConduitId& id);

}  // namespace hetadapt::platform
