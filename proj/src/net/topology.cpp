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

#include "hetadapt/net/topology.hpp"

#include <algorithm>

#include "hetadapt/common/error.hpp"
#include "hetadapt/net/transport.hpp"

namespace hetadapt::net {

std::string_view to_string(LinkKind kind) { return kind == LinkKind::wired ? "wired" : "wireless"; }

std::string_view to_string(DropReason reason) {
  switch (reason) {
    case DropReason::no_route: return "no_route";
    case DropReason::link_down: return "link_down";
    case DropReason::host_dead: return "host_dead";
  }
  return "no_route";
}

HostPair make_pair_key(const HostId& a, const HostId& b) {
  return a < b ? HostPair{a, b} : HostPair{b, a};
}

void Topology::add_host(Host host) {
  if (hosts_.contains(host.id)) throw Error(ErrorCode::InvalidValue, "duplicate host '" + host.id + "'");
  auto id = host.id;
  hosts_.emplace(std::move(id), std::move(host));
}

void Topology::add_wired_link(const HostId& a, const HostId& b) {
  if (!has_host(a)) throw Error(ErrorCode::UnknownEntity, "host '" + a + "'");
  if (!has_host(b)) throw Error(ErrorCode::UnknownEntity, "host '" + b + "'");
  if (a == b) throw Error(ErrorCode::InvalidValue, "self link on '" + a + "'");
  wired_.insert(make_pair_key(a, b));
}

const Host& Topology::host(const HostId& id) const {
  auto it = hosts_.find(id);
  if (it == hosts_.end()) throw Error(ErrorCode::UnknownEntity, "host '" + id + "'");
  return it->second;
}

Host& Topology::host(const HostId& id) {
  auto it = hosts_.find(id);
  if (it == hosts_.end()) throw Error(ErrorCode::UnknownEntity, "host '" + id + "'");
  return it->second;
}

void Topology::recompute() {
  links_.clear();
  for (const auto& key : wired_) {
    const auto& a = hosts_.at(key.first);
    const auto& b = hosts_.at(key.second);
    bool up = a.alive && b.alive && !failed_links_.contains(key);
    links_[key] = Link{key, LinkKind::wired, up ? LinkState::up : LinkState::down};
  }
  for (auto i = hosts_.begin(); i != hosts_.end(); ++i) {
    for (auto j = std::next(i); j != hosts_.end(); ++j) {
      const Host& a = i->second;
      const Host& b = j->second;
      HostPair key{a.id, b.id};
      if (links_.contains(key) || !a.wireless() || !b.wireless()) continue;
      if (distance(a.position, b.position) > std::min(a.radio_range, b.radio_range)) continue;
      bool up = a.alive && b.alive && !failed_links_.contains(key);
      links_[key] = Link{key, LinkKind::wireless, up ? LinkState::up : LinkState::down};
    }
  }
}

bool Topology::link_up(const HostId& a, const HostId& b) const {
  auto it = links_.find(make_pair_key(a, b));
  return it != links_.end() && it->second.state == LinkState::up;
}

std::optional<LinkKind> Topology::link_kind(const HostId& a, const HostId& b) const {
  auto it = links_.find(make_pair_key(a, b));
  if (it == links_.end()) return std::nullopt;
  return it->second.kind;
}

std::vector<HostId> Topology::neighbors(const HostId& id) const {
  std::vector<HostId> out;
  for (const auto& [key, link] : links_) {
    if (link.state != LinkState::up) continue;
    if (key.first == id) out.push_back(key.second);
    else if (key.second == id) out.push_back(key.first);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void Topology::kill_host(const HostId& id) {
  host(id).alive = false;
  recompute();
}

void Topology::apply(const TopologyEvent& event) {
  std::visit(
      [this](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, topology_event::FailLink>) {
          host(e.a);
          host(e.b);
          failed_links_.insert(make_pair_key(e.a, e.b));
        } else if constexpr (std::is_same_v<T, topology_event::FailHost>) {
          host(e.host).alive = false;
        } else if constexpr (std::is_same_v<T, topology_event::MoveHost>) {
          host(e.host).position = e.to;
        } else {
          Host& h = host(e.a);
          if (e.b) {
            host(*e.b);
            failed_links_.erase(make_pair_key(e.a, *e.b));
          } else {
            h.alive = true;
            // Refill: battery returns to its initial charge.
            h.recharged = h.energy.total();
          }
        }
      },
      event);
  recompute();
}

}  // namespace hetadapt::net
