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

#include <string>
#include <tuple>
#include <vector>

#include "hetadapt/core/model.hpp"
#include "hetadapt/qos/config.hpp"

namespace hetadapt::qos {

/// A configuration node resolved to a host; identifies one PE.
struct BoundNode {
  std::string cm;
  HostId host;

  PeId pe_id() const { return cm + "@" + host; }
  friend auto operator<=>(const BoundNode&, const BoundNode&) = default;
};

struct BoundEdge {
  BoundNode source;
  BoundNode target;
  core::TransportPolicy policy = core::TransportPolicy::fifo;
  std::vector<FlowId> flows;

  ConduitId conduit_id() const;
  auto key() const { return std::tie(source, target, policy); }
  friend bool operator==(const BoundEdge& a, const BoundEdge& b) { return a.key() == b.key() && a.flows == b.flows; }
};

struct BoundConfiguration {
  std::string id;
  std::vector<BoundNode> nodes;
  std::vector<BoundEdge> edges;
};

/// Throws UnboundNode if a node has no host in `binding`.
BoundConfiguration bind(const ConfigurationGraph& config, const Binding& binding);

/// Ordered destroy/create sets turning one deployment into another.
struct ReconfigurationScript {
  std::string target_id;
  std::vector<BoundEdge> destroy_conduits;
  std::vector<BoundNode> destroy_containers;
  std::vector<BoundNode> create_containers;
  std::vector<BoundEdge> create_conduits;

  bool empty() const {
    return destroy_conduits.empty() && destroy_containers.empty() && create_containers.empty() &&
           create_conduits.empty();
  }
};

/// Set difference on (cm, host) for nodes and (source, target, policy) for
/// edges; components present on both sides are left untouched.
ReconfigurationScript diff_config(const BoundConfiguration* current, const ConfigurationGraph& next,
                                  const Binding& binding);
ReconfigurationScript diff_bound(const BoundConfiguration* current, const BoundConfiguration& next);

/// Applies a script at the set level (no world involved).
BoundConfiguration apply_script(const BoundConfiguration& current, const ReconfigurationScript& script);

/// Same nodes and edges regardless of order or id.
bool isomorphic(const BoundConfiguration& a, const BoundConfiguration& b);

}  // namespace hetadapt::qos
