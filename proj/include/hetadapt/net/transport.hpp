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
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hetadapt/net/clock.hpp"
#include "hetadapt/net/topology.hpp"

namespace hetadapt::net {

enum class DropReason { no_route, link_down, host_dead };
std::string_view to_string(DropReason reason);

using NextHopFn = std::function<std::optional<HostId>(const HostId& at, const HostId& dst)>;

template <class Payload>
struct Message {
  std::uint64_t id = 0;
  HostId src;
  HostId dst;
  HostId at;
  Priority priority = Priority::normal;
  double bytes = 0;
  Tick sent_tick = 0;
  int hops = 0;
  Payload payload;
};

template <class Payload>
struct Dropped {
  Message<Payload> message;
  DropReason reason;
};

/// Store-and-forward carrier. One tick per hop; each hop charges E_tx to the
/// transmitting host and E_rx to the receiving host.
template <class Payload>
class Transport {
 public:
  using Msg = Message<Payload>;

  enum class SendStatus { delivered, in_flight, dropped };

  struct SendResult {
    SendStatus status;
    std::optional<Msg> delivered;  // set when src == dst
    std::optional<DropReason> reason;
  };

  Transport(Topology& topology, const EnergyParams& energy, NextHopFn next_hop)
      : topology_(&topology), energy_(&energy), next_hop_(std::move(next_hop)) {}

  SendResult send(const HostId& src, const HostId& dst, Payload payload, double bytes,
                  Priority priority, Tick tick) {
    Msg msg{next_id_++, src, dst, src, priority, bytes, tick, 0, std::move(payload)};
    if (!topology_->host(src).alive) return {SendStatus::dropped, std::nullopt, DropReason::host_dead};
    if (src == dst) return {SendStatus::delivered, std::move(msg), std::nullopt};
    if (auto reason = transmit(msg, tick)) {
      last_dropped_ = std::move(msg);
      return {SendStatus::dropped, std::nullopt, reason};
    }
    return {SendStatus::in_flight, std::nullopt, std::nullopt};
  }

  /// Message handed back by the last failed send(), for callers that log it.
  const std::optional<Msg>& last_dropped() const { return last_dropped_; }

  /// Advances every message due at `tick` by one hop. Messages that reached
  /// their destination are returned in key order; failures go to `drops`.
  std::vector<Msg> deliver_due(Tick tick, std::vector<Dropped<Payload>>& drops) {
    std::vector<Msg> arrived;
    for (auto& msg : in_flight_.pop_due(tick)) {
      if (!topology_->host(msg.at).alive) {
        drops.push_back({std::move(msg), DropReason::host_dead});
        continue;
      }
      if (msg.at == msg.dst) {
        arrived.push_back(std::move(msg));
        continue;
      }
      if (auto reason = transmit(msg, tick)) drops.push_back({std::move(msg), *reason});
    }
    return arrived;
  }

  template <class Pred>
  std::vector<Msg> extract_if(Pred pred) {
    return in_flight_.extract_if(pred);
  }

  template <class Pred>
  std::size_t count_if(Pred pred) const {
    return in_flight_.count_if(pred);
  }

  std::size_t in_flight() const { return in_flight_.size(); }

 private:
  std::optional<DropReason> transmit(Msg& msg, Tick tick) {
    auto hop = next_hop_(msg.at, msg.dst);
    if (!hop) return DropReason::no_route;
    if (!topology_->link_up(msg.at, *hop)) return DropReason::link_down;
    charge_energy(topology_->host(msg.at), EnergyKind::tx, energy_->tx_cost(msg.bytes));
    charge_energy(topology_->host(*hop), EnergyKind::rx, energy_->rx_cost(msg.bytes));
    HostId from = msg.at;
    msg.at = *hop;
    ++msg.hops;
    in_flight_.push(tick + 1, msg.priority, std::move(from), std::move(msg));
    return std::nullopt;
  }

  Topology* topology_;
  const EnergyParams* energy_;
  NextHopFn next_hop_;
  EventQueue<Msg> in_flight_;
  std::optional<Msg> last_dropped_;
  std::uint64_t next_id_ = 1;
};

}  // namespace hetadapt::net
