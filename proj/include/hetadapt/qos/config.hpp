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

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hetadapt/core/model.hpp"
#include "hetadapt/net/footprint.hpp"
#include "hetadapt/net/host.hpp"
#include "hetadapt/net/topology.hpp"
#include "hetadapt/routing/routing.hpp"

namespace hetadapt::qos {

enum class EdgeConstraint { synchronized, realtime };
std::string_view to_string(EdgeConstraint c);
EdgeConstraint edge_constraint_from_string(std::string_view text);

/// {} -> fifo, {synchronized} -> synchronized, {realtime} -> realtime_drop.
/// Both at once has no policy and throws InvalidValue.
core::TransportPolicy policy_for(const std::set<EdgeConstraint>& constraints);

/// Either an explicit host or a class/capability constraint.
struct HostConstraint {
  std::optional<HostId> host;
  std::optional<net::HostClass> cls;
  std::optional<std::string> capability;

  friend bool operator==(const HostConstraint&, const HostConstraint&) = default;
};

struct ConfigNode {
  std::string id;
  std::string cm;
  HostConstraint binding;

  friend bool operator==(const ConfigNode&, const ConfigNode&) = default;
};

struct ConfigEdge {
  std::string source;
  std::string target;
  std::set<EdgeConstraint> constraints;
  std::vector<FlowId> flows;

  friend bool operator==(const ConfigEdge&, const ConfigEdge&) = default;
};

struct ConfigurationGraph {
  std::string id;
  std::vector<ConfigNode> nodes;
  std::vector<ConfigEdge> edges;
  int qos_level = 0;

  const ConfigNode* node(std::string_view id) const;
  friend bool operator==(const ConfigurationGraph&, const ConfigurationGraph&) = default;
};

struct ConfigurationFamily {
  std::string application;
  HostId supervisor;
  std::vector<ConfigurationGraph> configurations;

  const ConfigurationGraph* find(std::string_view id) const;
  friend bool operator==(const ConfigurationFamily&, const ConfigurationFamily&) = default;
};

/// Structural checks: node/edge references, flow compatibility along edges,
/// enough input ports on each target, a connected graph. Fills edge flows
/// left empty with the flows both ends share. Throws InvalidValue.
void normalize(ConfigurationGraph& config, const core::Repository& repository);
void normalize(ConfigurationFamily& family, const core::Repository& repository);

struct ContextParams {
  net::EnergyParams energy;
  net::Footprints footprints;
  double control_bytes = 32;
  int uc_report_period = 10;
};

/// Frozen view of the world used for validity and scoring. Host memory_used
/// is the share not attributable to the application (zero in practice).
struct ContextSnapshot {
  Tick tick = 0;
  HostId supervisor;
  std::map<HostId, net::Host> hosts;
  std::map<HostId, routing::RouteTable> tables;
  std::map<net::HostPair, net::LinkKind> links;
  core::Repository repository;
  ContextParams params;

  std::optional<int> hops(const HostId& from, const HostId& to) const;
  bool reachable(const HostId& from, const HostId& to) const { return hops(from, to).has_value(); }
  /// Hosts visited from `from` to `to` (inclusive), following next hops.
  std::vector<HostId> path(const HostId& from, const HostId& to) const;
  std::optional<HostId> correspondent(const HostId& light) const;
};

struct Binding {
  std::map<std::string, HostId> node_hosts;
  std::map<HostId, HostId> correspondents;

  friend bool operator==(const Binding&, const Binding&) = default;
};

struct Validity {
  bool valid = false;
  std::vector<std::string> violations;
  std::optional<Binding> binding;
};

/// Valid iff every node can be bound to an alive host meeting its constraint
/// (capability, capacity, closed world) and every edge joins mutually
/// reachable hosts that the supervisor can reach. The binding returned is
/// the first in preference order: per node, fewest hops to the data source
/// node, then lowest host id.
Validity is_valid(const ConfigurationGraph& config, const ContextSnapshot& context);

/// Violations of a fixed binding in `context`; empty if it still holds.
std::vector<std::string> check_binding(const ConfigurationGraph& config, const Binding& binding,
                                       const ContextSnapshot& context);

/// Lexicographic: qos level (higher wins), energy rate on light and sensor
/// hosts (lower wins), conduits crossing wireless links (fewer wins), id.
struct Score {
  int qos_level = 0;
  double energy_rate = 0;
  int wireless_conduits = 0;
  std::string id;

  friend bool operator==(const Score&, const Score&) = default;
};

/// True if `a` ranks strictly ahead of `b`.
bool better(const Score& a, const Score& b);
/// Same order without the final id tie-break (used for hysteresis).
bool strictly_better_ignoring_id(const Score& a, const Score& b);

Score score(const ConfigurationGraph& config, const ContextSnapshot& context);
Score score_with(const ConfigurationGraph& config, const Binding& binding, const ContextSnapshot& context);
double energy_rate(const ConfigurationGraph& config, const Binding& binding, const ContextSnapshot& context);

struct Selection {
  const ConfigurationGraph* config = nullptr;
  Binding binding;
  Score score;
};

/// Best-scoring valid configuration, skipping ids in `excluded`.
std::optional<Selection> select(const ConfigurationFamily& family, const ContextSnapshot& context,
                                const std::set<std::string>& excluded = {});

struct RankedConfiguration {
  std::string id;
  bool valid = false;
  std::optional<Score> score;
  std::optional<Binding> binding;
  std::vector<std::string> violations;
};

/// Every configuration, valid ones first in score order, then invalid by id.
std::vector<RankedConfiguration> rank_configurations(const ConfigurationFamily& family,
                                                     const ContextSnapshot& context);

}  // namespace hetadapt::qos
