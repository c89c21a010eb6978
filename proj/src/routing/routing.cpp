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

#include "hetadapt/routing/routing.hpp"

#include <algorithm>
#include <deque>

#include "hetadapt/common/error.hpp"

namespace hetadapt::routing {

std::optional<RouteEntry> RouteTable::lookup(const HostId& destination) const {
  auto it = entries.find(destination);
  if (it == entries.end()) return std::nullopt;
  return it->second;
}

std::optional<Route> route_lookup(const RouteTable& table, const HostId& destination) {
  auto entry = table.lookup(destination);
  if (!entry) return std::nullopt;
  return Route{entry->next_hop, entry->hop_count};
}

std::vector<RouteNotice> diff_routes(const RouteTable& before, const RouteTable& after) {
  std::vector<RouteNotice> notices;
  for (const auto& dest : after.in_use) {
    if (dest == after.owner) continue;
    auto old_route = route_lookup(before, dest);
    auto new_route = route_lookup(after, dest);
    if (old_route && !new_route) {
      notices.push_back({NoticeKind::alert, after.owner, dest, old_route, std::nullopt});
    } else if (old_route && new_route && *old_route != *new_route) {
      notices.push_back({NoticeKind::info, after.owner, dest, old_route, new_route});
    }
  }
  return notices;
}

RoutingService::HostState& RoutingService::state(const HostId& host) {
  auto it = hosts_.find(host);
  if (it == hosts_.end()) {
    it = hosts_.emplace(host, HostState{}).first;
    it->second.table.owner = host;
  }
  return it->second;
}

const RoutingService::HostState& RoutingService::state(const HostId& host) const {
  auto it = hosts_.find(host);
  if (it == hosts_.end()) throw Error(ErrorCode::UnknownEntity, "no routing state for '" + host + "'");
  return it->second;
}

const RouteTable& RoutingService::table(const HostId& host) const { return state(host).table; }

void RoutingService::set_in_use(const HostId& host, std::set<HostId> destinations) {
  state(host).table.in_use = std::move(destinations);
}

std::optional<HostId> RoutingService::next_hop(const HostId& at, const HostId& dst) const {
  auto it = hosts_.find(at);
  if (it == hosts_.end()) return std::nullopt;
  auto entry = it->second.table.lookup(dst);
  if (!entry) return std::nullopt;
  return entry->next_hop;
}

std::set<HostId> RoutingService::declared_neighbors(const HostId& host) const {
  std::set<HostId> out;
  for (const auto& [id, n] : state(host).neighbors)
    if (n.up) out.insert(id);
  return out;
}

void RoutingService::bootstrap(const net::Topology& topology) {
  hosts_.clear();
  std::map<HostId, Lsa> global;
  for (const auto& [id, host] : topology.hosts()) {
    auto& st = state(id);
    if (!host.alive) continue;
    st.own_sequence = 1;
    Lsa lsa{id, 1, {}};
    for (const auto& n : topology.neighbors(id)) {
      st.neighbors[n] = Neighbor{true, 0};
      lsa.neighbors.insert(n);
    }
    global[id] = lsa;
  }
  for (const auto& [id, host] : topology.hosts()) {
    if (!host.alive) continue;
    auto& st = state(id);
    st.lsdb = global;
    TableDelta ignored;
    recompute_routes(st, ignored);
  }
}

void RoutingService::begin_tick() {
  for (auto& [id, st] : hosts_) {
    st.inbox = std::move(st.next_inbox);
    st.next_inbox.clear();
  }
}

void RoutingService::send_lsa(const net::Topology& topology, const HostId& from, const HostId& to,
                              const Lsa& lsa) {
  if (!topology.link_up(from, to)) return;
  state(to).next_inbox.push_back({from, lsa});
}

TableDelta RoutingService::routing_tick(const HostId& host, const net::Topology& topology) {
  TableDelta delta{host, {}};
  if (!topology.host(host).alive) return delta;
  auto& st = state(host);

  // Hellos.
  bool changed = false;
  std::vector<HostId> newly_up;
  auto heard = topology.neighbors(host);
  for (const auto& n : heard) {
    auto& nb = st.neighbors[n];
    nb.missed = 0;
    if (!nb.up) {
      nb.up = true;
      changed = true;
      newly_up.push_back(n);
    }
  }
  for (auto& [id, nb] : st.neighbors) {
    if (!nb.up || std::binary_search(heard.begin(), heard.end(), id)) continue;
    if (++nb.missed >= hello_miss_) {
      nb.up = false;
      changed = true;
    }
  }
  std::vector<HostId> up_neighbors;
  for (const auto& [id, nb] : st.neighbors)
    if (nb.up) up_neighbors.push_back(id);

  // Flooding.
  auto inbox = std::move(st.inbox);
  st.inbox.clear();
  for (auto& in : inbox) {
    if (in.lsa.origin == host) continue;
    auto it = st.lsdb.find(in.lsa.origin);
    if (it != st.lsdb.end() && it->second.sequence >= in.lsa.sequence) continue;
    st.lsdb[in.lsa.origin] = in.lsa;
    for (const auto& n : up_neighbors)
      if (n != in.from) send_lsa(topology, host, n, in.lsa);
  }

  if (changed) {
    Lsa own{host, ++st.own_sequence, {up_neighbors.begin(), up_neighbors.end()}};
    st.lsdb[host] = own;
    for (const auto& n : up_neighbors) {
      if (std::find(newly_up.begin(), newly_up.end(), n) != newly_up.end()) {
        for (const auto& [origin, lsa] : st.lsdb) send_lsa(topology, host, n, lsa);
      } else {
        send_lsa(topology, host, n, own);
      }
    }
  }

  recompute_routes(st, delta);
  return delta;
}

void RoutingService::recompute_routes(HostState& st, TableDelta& delta) {
  const HostId& owner = st.table.owner;
  std::set<HostId> own_adj;
  for (const auto& [id, nb] : st.neighbors)
    if (nb.up) own_adj.insert(id);

  auto adjacent = [&](const HostId& u) {
    std::vector<HostId> out;
    const std::set<HostId>* listed = nullptr;
    if (u == owner) {
      listed = &own_adj;
    } else {
      auto it = st.lsdb.find(u);
      if (it == st.lsdb.end()) return out;
      listed = &it->second.neighbors;
    }
    for (const auto& v : *listed) {
      // Edges count only when both ends advertise each other.
      const std::set<HostId>* back = nullptr;
      if (v == owner) {
        back = &own_adj;
      } else {
        auto jt = st.lsdb.find(v);
        if (jt == st.lsdb.end()) continue;
        back = &jt->second.neighbors;
      }
      if (back->contains(u)) out.push_back(v);
    }
    return out;
  };

  // BFS by levels; each node inherits the lowest first hop among its
  // shortest-path predecessors.
  std::map<HostId, int> dist;
  std::map<HostId, HostId> first_hop;
  dist[owner] = 0;
  first_hop[owner] = owner;
  std::vector<HostId> frontier{owner};
  int level = 0;
  while (!frontier.empty()) {
    std::map<HostId, HostId> next;
    for (const auto& u : frontier) {
      for (const auto& v : adjacent(u)) {
        if (dist.contains(v)) continue;
        const HostId& hop = (u == owner) ? v : first_hop[u];
        auto it = next.find(v);
        if (it == next.end() || hop < it->second) next[v] = hop;
      }
    }
    ++level;
    frontier.clear();
    for (auto& [v, hop] : next) {
      dist[v] = level;
      first_hop[v] = hop;
      frontier.push_back(v);
    }
  }

  std::map<HostId, RouteEntry> fresh;
  for (const auto& [dest, d] : dist) {
    RouteEntry entry{first_hop[dest], d, 1};
    auto old = st.table.entries.find(dest);
    if (old != st.table.entries.end()) {
      if (old->second.next_hop == entry.next_hop && old->second.hop_count == entry.hop_count) {
        entry.version = old->second.version;
      } else {
        entry.version = old->second.version + 1;
        delta.changed[dest] = entry;
      }
    } else {
      delta.changed[dest] = entry;
    }
    fresh[dest] = entry;
  }
  for (const auto& [dest, entry] : st.table.entries)
    if (!fresh.contains(dest)) delta.changed[dest] = std::nullopt;
  st.table.entries = std::move(fresh);
}

void RoutingService::on_host_died(const HostId& host) {
  auto& st = state(host);
  st.table.entries.clear();
  st.neighbors.clear();
  st.lsdb.clear();
  st.inbox.clear();
  st.next_inbox.clear();
}

void RoutingService::on_host_restored(const HostId& host) {
  auto& st = state(host);
  st.neighbors.clear();
  st.lsdb.clear();
  st.lsdb[host] = Lsa{host, ++st.own_sequence, {}};
  st.table.entries.clear();
  st.table.entries[host] = RouteEntry{host, 0, 1};
}

}  // namespace hetadapt::routing
