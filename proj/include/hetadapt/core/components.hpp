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

#include <map>
#include <vector>

#include "hetadapt/core/model.hpp"
#include "hetadapt/net/footprint.hpp"
#include "hetadapt/net/host.hpp"

namespace hetadapt::core {

/// Fragments a PE leaves on its own host for the given UC placement.
std::vector<net::FragmentDemand> local_pe_fragments(const BusinessComponentDescriptor& descriptor,
                                                    const UcPlacement& uc);

/// Creates a PE in state `created`. Checks repository visibility (sensor
/// hosts only see their preloaded package), sensing capability and memory.
ElementaryProcessor instantiate_pe(const Repository& repository, std::string_view cm,
                                   const net::Host& host, UcPlacement uc,
                                   const net::Footprints& footprints,
                                   std::size_t mailbox_capacity = 16);

struct StepResult {
  std::uint64_t processed = 0;
  std::uint64_t activations = 0;
  double energy_charge = 0;
  /// (output port, frame) in emission order.
  std::vector<std::pair<std::size_t, DataFrame>> produced;
};

/// Runs one tick of the PE's CM according to its interaction style.
/// Produced frames are appended to the PE's output unit.
StepResult pe_step(ElementaryProcessor& pe, const BusinessComponentDescriptor& descriptor, Tick tick);

enum class AcceptResult { queued, rejected };

/// Input-unit arrival. Mailbox PEs reject arrivals beyond their capacity.
AcceptResult accept_frame(ElementaryProcessor& pe, std::size_t in_port, DataFrame frame);

struct ConduitStepResult {
  std::vector<DataFrame> delivered;
  std::uint64_t dropped = 0;
  bool blocked = false;
};

/// Moves the conduit's buffered frames according to its transport policy.
/// When `route_available` is false nothing moves and the conduit is blocked.
ConduitStepResult conduit_step(Conduit& conduit, bool route_available);

/// Appends a frame to the conduit's per-flow buffer.
void conduit_accept(Conduit& conduit, DataFrame frame);

StateReport apply_command(ElementaryProcessor& pe, const ControlCommand& command);
StateReport apply_command(Conduit& conduit, const ControlCommand& command);
StateReport probe(const ElementaryProcessor& pe);
StateReport probe(const Conduit& conduit);

/// The runtime application graph: PEs joined by Conduits, never PE to PE.
class ComponentTopology {
 public:
  void add_pe(ElementaryProcessor pe);
  bool has_pe(const PeId& id) const { return pes_.contains(id); }
  bool has_conduit(const ConduitId& id) const { return conduits_.contains(id); }
  ElementaryProcessor& pe(const PeId& id);
  const ElementaryProcessor& pe(const PeId& id) const;
  Conduit& conduit(const ConduitId& id);
  const Conduit& conduit(const ConduitId& id) const;

  /// Attaches `conduit` between source_pe.out_port and target_pe.in_port.
  /// The anchor ports carry conduit.flows[0]; further flows bind to the next
  /// free ports of the same type. Throws PortBusy, FlowTypeMismatch or
  /// DanglingEndpoint.
  Conduit& connect(const PeId& source_pe, std::size_t out_port, Conduit conduit,
                   const PeId& target_pe, std::size_t in_port);

  /// Removes the conduit and returns the frames still in its buffers.
  std::vector<DataFrame> remove_conduit(const ConduitId& id);
  /// Removes the PE; it must have no attached conduits.
  ElementaryProcessor remove_pe(const PeId& id);

  std::map<PeId, ElementaryProcessor>& pes() { return pes_; }
  const std::map<PeId, ElementaryProcessor>& pes() const { return pes_; }
  std::map<ConduitId, Conduit>& conduits() { return conduits_; }
  const std::map<ConduitId, Conduit>& conduits() const { return conduits_; }

 private:
  std::map<PeId, ElementaryProcessor> pes_;
  std::map<ConduitId, Conduit> conduits_;
};

/// First free port on `ports` carrying `flow`, skipping bound ones.
std::optional<std::size_t> free_port(const std::vector<FlowId>& ports,
                                     const std::vector<std::optional<ConduitId>>& bound,
                                     const FlowId& flow);

}  // namespace hetadapt::core
