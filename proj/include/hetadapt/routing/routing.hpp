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
#include <set>
#include <vector>

#include "hetadapt/common/types.hpp"
#include "hetadapt/net/topology.hpp"

namespace hetadapt::routing {

struct RouteEntry {
  HostId next_hop;
  int hop_count = 0;
  std::uint64_t version = 0;

  friend bool operator==(const RouteEntry&, const RouteEntry&) = default;
};

struct RouteTable {
  HostId owner;
  std::map<HostId, RouteEntry> entries;
  /// Destinations carrying conduit traffic or control-unit channels.
  std::set<HostId> in_use;

  std::optional<RouteEntry> lookup(const HostId& destination) const;
};

struct Route {
  HostId next_hop;
  int hop_count = 0;

  friend bool operator==(const Route&, const Route&) = default;
};

std::optional<Route> route_lookup(const RouteTable& table, const HostId& destination);

enum class NoticeKind { alert, info };

/// ROUTE_ALERT (in-use destination became unreachable) or ROUTE_INFO
/// (in-use destination still reachable over a different path).
struct RouteNotice {
  NoticeKind kind = NoticeKind::info;
  HostId owner;
  HostId destination;
  std::optional<Route> before;
  std::optional<Route> after;

  Priority priority() const { return kind == NoticeKind::alert ? Priority::priority : Priority::normal; }
};

std::vector<RouteNotice> diff_routes(const RouteTable& before, const RouteTable& after);

/// Link-state advertisement: the origin's current adjacency list.
struct Lsa {
  HostId origin;
  std::uint64_t sequence = 0;
  std::set<HostId> neighbors;
};

struct TableDelta {
  HostId owner;
  std::map<HostId, std::optional<RouteEntry>> changed;  // nullopt = removed
  bool empty() const { return changed.empty(); }
};

/// Per-host routing state: hello-based neighbour liveness, a link-state
/// database, and the shortest-path route table. A neighbour is declared down
/// after `hello_miss` consecutive missed hellos; LSAs travel one hop per tick.
class RoutingService {
 public:
  explicit RoutingService(int hello_miss = 2) : hello_miss_(hello_miss) {}

  /// Converged state for the given topology (used at simulation start).
  void bootstrap(const net::Topology& topology);

  /// Makes the advertisements sent during the previous tick visible to their
  /// receivers. Call once per tick before any routing_tick().
  void begin_tick();

  TableDelta routing_tick(const HostId& host, const net::Topology& topology);

  void on_host_died(const HostId& host);
  void on_host_restored(const HostId& host);

  const RouteTable& table(const HostId& host) const;
  void set_in_use(const HostId& host, std::set<HostId> destinations);
  std::optional<HostId> next_hop(const HostId& at, const HostId& dst) const;

  int hello_miss() const { return hello_miss_; }
  void set_hello_miss(int k) { hello_miss_ = k; }

  const std::map<HostId, Lsa>& lsdb(const HostId& host) const { return state(host).lsdb; }
  std::set<HostId> declared_neighbors(const HostId& host) const;

 private:
  struct Neighbor {
    bool up = false;
    int missed = 0;
  };
  struct Incoming {
    HostId from;
    Lsa lsa;
  };
  struct HostState {
    RouteTable table;
    std::map<HostId, Neighbor> neighbors;
    std::map<HostId, Lsa> lsdb;
    std::uint64_t own_sequence = 0;
    std::vector<Incoming> inbox;
    std::vector<Incoming> next_inbox;
  };

  HostState& state(const HostId& host);
  const HostState& state(const HostId& host) const;
  void recompute_routes(HostState& st, TableDelta& delta);
  void send_lsa(const net::Topology& topology, const HostId& from, const HostId& to, const Lsa& lsa);

  int hello_miss_;
  std::map<HostId, HostState> hosts_;
};

}  // namespace hetadapt::routing
