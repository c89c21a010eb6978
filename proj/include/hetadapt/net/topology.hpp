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
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hetadapt/net/host.hpp"

namespace hetadapt::net {

enum class LinkKind { wired, wireless };
enum class LinkState { up, down };

std::string_view to_string(LinkKind kind);

/// Unordered host pair; `first < second` always.
using HostPair = std::pair<HostId, HostId>;
HostPair make_pair_key(const HostId& a, const HostId& b);

struct Link {
  HostPair endpoints;
  LinkKind kind = LinkKind::wired;
  LinkState state = LinkState::down;
};

namespace topology_event {
struct FailLink {
  HostId a, b;
};
struct FailHost {
  HostId host;
};
struct MoveHost {
  HostId host;
  Position to;
};
/// Restores a failed host (battery refilled) or a failed link.
struct Restore {
  HostId a;
  std::optional<HostId> b;
};
}  // namespace topology_event

using TopologyEvent = std::variant<topology_event::FailLink, topology_event::FailHost,
                                   topology_event::MoveHost, topology_event::Restore>;

/// Hosts plus the link set derived from wiring, radio ranges and failures.
class Topology {
 public:
  void add_host(Host host);
  void add_wired_link(const HostId& a, const HostId& b);

  bool has_host(const HostId& id) const { return hosts_.contains(id); }
  const Host& host(const HostId& id) const;
  Host& host(const HostId& id);
  const std::map<HostId, Host>& hosts() const { return hosts_; }
  const std::set<HostPair>& wired_links() const { return wired_; }

  /// Rebuilds the link set. Wireless links exist iff both hosts have a radio,
  /// are within min(range) of each other, are alive and the pair is not failed.
  void recompute();

  bool link_up(const HostId& a, const HostId& b) const;
  std::optional<LinkKind> link_kind(const HostId& a, const HostId& b) const;
  std::vector<HostId> neighbors(const HostId& id) const;
  const std::map<HostPair, Link>& links() const { return links_; }

  /// Applies the event and recomputes links. Throws UnknownEntity.
  void apply(const TopologyEvent& event);

  /// Marks a host dead and drops its links.
  void kill_host(const HostId& id);

 private:
  std::map<HostId, Host> hosts_;
  std::set<HostPair> wired_;
  std::set<HostPair> failed_links_;
  std::map<HostPair, Link> links_;
};

}  // namespace hetadapt::net
