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
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hetadapt/common/types.hpp"

namespace hetadapt::core {

enum class InteractionStyle { event, method_call, mailbox };
enum class Category { software, sensing };
enum class TransportPolicy { fifo, synchronized, realtime_drop };
enum class ComponentState { created, running, stopped, failed };

std::string_view to_string(InteractionStyle style);
std::string_view to_string(TransportPolicy policy);
std::string_view to_string(ComponentState state);
InteractionStyle interaction_style_from_string(std::string_view text);
TransportPolicy transport_policy_from_string(std::string_view text);

/// Simulated CM body. Pass-through emits one output per processed input,
/// downsample emits every k-th, threshold emits when digest % 100 < param.
struct Transform {
  enum class Kind { passthrough, downsample, threshold };
  Kind kind = Kind::passthrough;
  int param = 1;

  friend bool operator==(const Transform&, const Transform&) = default;
};

std::string_view to_string(Transform::Kind kind);
Transform::Kind transform_kind_from_string(std::string_view text);

struct BusinessComponentDescriptor {
  std::string id;
  InteractionStyle interaction_style = InteractionStyle::event;
  std::vector<FlowId> input_flows;
  std::vector<FlowId> output_flows;
  int memory_footprint = 1;
  int cpu_cost = 0;
  Category category = Category::software;
  std::string capability;  // sensing only
  int frame_bytes = 64;
  int period = 1;          // production period for CMs without inputs
  Transform transform;

  bool is_source() const { return input_flows.empty(); }
  friend bool operator==(const BusinessComponentDescriptor&, const BusinessComponentDescriptor&) = default;
};

/// Throws InvalidValue when a descriptor invariant does not hold.
void validate(const BusinessComponentDescriptor& descriptor);

class Repository {
 public:
  void add(BusinessComponentDescriptor descriptor);
  const BusinessComponentDescriptor* find(std::string_view id) const;
  const BusinessComponentDescriptor& at(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }
  const std::map<std::string, BusinessComponentDescriptor, std::less<>>& all() const { return items_; }
  friend bool operator==(const Repository&, const Repository&) = default;

 private:
  std::map<std::string, BusinessComponentDescriptor, std::less<>> items_;
};

struct DataFrame {
  FlowId flow_id;
  std::uint64_t seq = 0;
  int payload_size = 0;
  Tick produced_tick = 0;
  std::uint64_t payload_digest = 0;
  PeId producer;

  friend bool operator==(const DataFrame&, const DataFrame&) = default;
};

/// Where a control unit runs. Local: whole UC next to the component.
/// Split: a relay stub beside the component, the logic on a fixed host.
struct UcPlacement {
  bool split = false;
  HostId stub_on;
  HostId logic_on;

  static UcPlacement local() { return {}; }
  static UcPlacement deported(HostId stub, HostId logic) { return {true, std::move(stub), std::move(logic)}; }
  friend bool operator==(const UcPlacement&, const UcPlacement&) = default;
};

struct ElementaryProcessor {
  PeId id;
  std::string cm;
  HostId host;
  InteractionStyle style = InteractionStyle::event;
  ComponentState state = ComponentState::created;
  UcPlacement uc;
  std::vector<FlowId> in_ports;
  std::vector<FlowId> out_ports;
  std::vector<std::deque<DataFrame>> input_unit;
  std::vector<std::deque<DataFrame>> output_unit;
  std::vector<std::optional<ConduitId>> in_bound;
  std::vector<std::optional<ConduitId>> out_bound;
  std::map<FlowId, std::uint64_t> next_seq;
  std::size_t mailbox_capacity = 16;
  std::uint64_t digest_salt = 0;
  std::uint64_t processed_total = 0;
  std::uint64_t processed_window = 0;
  std::uint64_t drops_window = 0;
  std::map<std::string, std::string> params;
};

struct PortRef {
  PeId pe;
  std::size_t port = 0;

  friend bool operator==(const PortRef&, const PortRef&) = default;
};

struct BufferedFrame {
  std::uint64_t arrival = 0;
  DataFrame frame;
};

struct Conduit {
  ConduitId id;
  PortRef source;
  PortRef target;
  std::vector<FlowId> flows;
  TransportPolicy transport_policy = TransportPolicy::fifo;
  UcPlacement uc;
  ComponentState state = ComponentState::created;
  HostId source_host;
  HostId target_host;
  /// Port bound for each entry of `flows`, on the source and target PEs.
  std::vector<std::size_t> source_ports;
  std::vector<std::size_t> target_ports;
  std::map<FlowId, std::deque<BufferedFrame>> buffers;
  std::uint64_t arrivals = 0;
  bool blocked = false;
  std::uint64_t delivered_window = 0;
  std::uint64_t drops_window = 0;
  std::map<std::string, std::string> params;

  std::size_t buffered() const;
};

struct ControlCommand {
  enum class Kind { start, stop, set_param, probe_state };
  std::string target;
  Kind kind = Kind::probe_state;
  std::string key;
  std::string value;
};

std::string_view to_string(ControlCommand::Kind kind);

struct StateReport {
  std::string source;
  ComponentState state = ComponentState::created;
  std::vector<std::size_t> queue_depths;
  std::uint64_t processed_last_window = 0;
  std::uint64_t drops_last_window = 0;
  bool blocked = false;

  std::size_t total_queue_depth() const;
};

}  // namespace hetadapt::core
