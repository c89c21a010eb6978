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

#include "hetadapt/qos/script.hpp"

#include <algorithm>

#include "hetadapt/common/error.hpp"

namespace hetadapt::qos {

ConduitId BoundEdge::conduit_id() const {
  return source.pe_id() + "->" + target.pe_id() + "#" + std::string(core::to_string(policy));
}

BoundConfiguration bind(const ConfigurationGraph& config, const Binding& binding) {
  BoundConfiguration out;
  out.id = config.id;
  auto bound = [&](const std::string& node_id) {
    const auto* node = config.node(node_id);
    if (!node) throw Error(ErrorCode::UnboundNode, "unknown node '" + node_id + "'");
    auto it = binding.node_hosts.find(node_id);
    if (it == binding.node_hosts.end())
      throw Error(ErrorCode::UnboundNode, "node '" + node_id + "' of '" + config.id + "'");
    return BoundNode{node->cm, it->second};
  };
  for (const auto& n : config.nodes) out.nodes.push_back(bound(n.id));
  for (const auto& e : config.edges)
    out.edges.push_back(BoundEdge{bound(e.source), bound(e.target), policy_for(e.constraints), e.flows});
  return out;
}

namespace {

bool edge_less(const BoundEdge& a, const BoundEdge& b) { return a.key() < b.key(); }

std::vector<BoundNode> sorted_nodes(std::vector<BoundNode> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<BoundEdge> sorted_edges(std::vector<BoundEdge> v) {
  std::stable_sort(v.begin(), v.end(), edge_less);
  return v;
}

template <class T, class Less>
std::vector<T> minus(const std::vector<T>& a, const std::vector<T>& b, Less less) {
  std::vector<T> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out), less);
  return out;
}

}  // namespace

ReconfigurationScript diff_bound(const BoundConfiguration* current, const BoundConfiguration& next) {
  ReconfigurationScript s;
  s.target_id = next.id;
  auto n2 = sorted_nodes(next.nodes);
  auto e2 = sorted_edges(next.edges);
  std::vector<BoundNode> n1;
  std::vector<BoundEdge> e1;
  if (current) {
    n1 = sorted_nodes(current->nodes);
    e1 = sorted_edges(current->edges);
  }
  s.destroy_conduits = minus(e1, e2, edge_less);
  s.destroy_containers = minus(n1, n2, std::less<>{});
  s.create_containers = minus(n2, n1, std::less<>{});
  s.create_conduits = minus(e2, e1, edge_less);
  return s;
}

ReconfigurationScript diff_config(const BoundConfiguration* current, const ConfigurationGraph& next,
                                  const Binding& binding) {
  return diff_bound(current, bind(next, binding));
}

BoundConfiguration apply_script(const BoundConfiguration& current, const ReconfigurationScript& script) {
  BoundConfiguration out;
  out.id = script.target_id;
  auto gone_edge = [&](const BoundEdge& e) {
    return std::any_of(script.destroy_conduits.begin(), script.destroy_conduits.end(),
                       [&](const BoundEdge& d) { return d.key() == e.key(); });
  };
  auto gone_node = [&](const BoundNode& n) {
    return std::find(script.destroy_containers.begin(), script.destroy_containers.end(), n) !=
           script.destroy_containers.end();
  };
  for (const auto& e : current.edges)
    if (!gone_edge(e)) out.edges.push_back(e);
  for (const auto& n : current.nodes)
    if (!gone_node(n)) out.nodes.push_back(n);
  for (const auto& n : script.create_containers) out.nodes.push_back(n);
  for (const auto& e : script.create_conduits) out.edges.push_back(e);
  return out;
}

bool isomorphic(const BoundConfiguration& a, const BoundConfiguration& b) {
  auto ea = sorted_edges(a.edges);
  auto eb = sorted_edges(b.edges);
  if (ea.size() != eb.size()) return false;
  for (std::size_t i = 0; i < ea.size(); ++i)
    if (ea[i].key() != eb[i].key()) return false;
  return sorted_nodes(a.nodes) == sorted_nodes(b.nodes);
}

}  // namespace hetadapt::qos
