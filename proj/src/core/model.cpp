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

#include "hetadapt/core/model.hpp"

#include "hetadapt/common/error.hpp"

namespace hetadapt::core {

std::string_view to_string(InteractionStyle style) {
  switch (style) {
    case InteractionStyle::event: return "event";
    case InteractionStyle::method_call: return "method_call";
    case InteractionStyle::mailbox: return "mailbox";
  }
  return "event";
}

std::string_view to_string(TransportPolicy policy) {
  switch (policy) {
    case TransportPolicy::fifo: return "fifo";
    case TransportPolicy::synchronized: return "synchronized";
    case TransportPolicy::realtime_drop: return "realtime_drop";
  }
  return "fifo";
}

std::string_view to_string(ComponentState state) {
  switch (state) {
    case ComponentState::created: return "created";
    case ComponentState::running: return "running";
    case ComponentState::stopped: return "stopped";
    case ComponentState::failed: return "failed";
  }
  return "created";
}

std::string_view to_string(Transform::Kind kind) {
  switch (kind) {
    case Transform::Kind::passthrough: return "passthrough";
    case Transform::Kind::downsample: return "downsample";
    case Transform::Kind::threshold: return "threshold";
  }
  return "passthrough";
}

std::string_view to_string(ControlCommand::Kind kind) {
  switch (kind) {
    case ControlCommand::Kind::start: return "start";
    case ControlCommand::Kind::stop: return "stop";
    case ControlCommand::Kind::set_param: return "set_param";
    case ControlCommand::Kind::probe_state: return "probe_state";
  }
  return "probe_state";
}

InteractionStyle interaction_style_from_string(std::string_view text) {
  if (text == "event") return InteractionStyle::event;
  if (text == "method_call") return InteractionStyle::method_call;
  if (text == "mailbox") return InteractionStyle::mailbox;
  throw Error(ErrorCode::InvalidValue, "unknown interaction style '" + std::string(text) + "'");
}

TransportPolicy transport_policy_from_string(std::string_view text) {
  if (text == "fifo") return TransportPolicy::fifo;
  if (text == "synchronized") return TransportPolicy::synchronized;
  if (text == "realtime_drop") return TransportPolicy::realtime_drop;
  throw Error(ErrorCode::InvalidValue, "unknown transport policy '" + std::string(text) + "'");
}

Transform::Kind transform_kind_from_string(std::string_view text) {
  if (text == "passthrough") return Transform::Kind::passthrough;
  if (text == "downsample") return Transform::Kind::downsample;
  if (text == "threshold") return Transform::Kind::threshold;
  throw Error(ErrorCode::InvalidValue, "unknown transform '" + std::string(text) + "'");
}

void validate(const BusinessComponentDescriptor& d) {
  if (d.id.empty()) throw Error(ErrorCode::InvalidValue, "descriptor without id");
  if (d.memory_footprint <= 0)
    throw Error(ErrorCode::InvalidValue, "descriptor '" + d.id + "': memory_footprint must be > 0");
  if (d.cpu_cost < 0) throw Error(ErrorCode::InvalidValue, "descriptor '" + d.id + "': negative cpu_cost");
  if (d.frame_bytes < 0) throw Error(ErrorCode::InvalidValue, "descriptor '" + d.id + "': negative frame_bytes");
  if (d.period <= 0) throw Error(ErrorCode::InvalidValue, "descriptor '" + d.id + "': period must be > 0");
  if (d.transform.param <= 0 && d.transform.kind == Transform::Kind::downsample)
    throw Error(ErrorCode::InvalidValue, "descriptor '" + d.id + "': downsample factor must be > 0");
  if (d.category == Category::sensing) {
    if (d.output_flows.empty())
      throw Error(ErrorCode::InvalidValue, "sensing descriptor '" + d.id + "' has no output flow");
    if (d.capability.empty())
      throw Error(ErrorCode::InvalidValue, "sensing descriptor '" + d.id + "' has no capability");
  }
}

void Repository::add(BusinessComponentDescriptor descriptor) {
  validate(descriptor);
  if (items_.contains(descriptor.id))
    throw Error(ErrorCode::InvalidValue, "duplicate descriptor '" + descriptor.id + "'");
  auto id = descriptor.id;
  items_.emplace(std::move(id), std::move(descriptor));
}

const BusinessComponentDescriptor* Repository::find(std::string_view id) const {
  auto it = items_.find(id);
  return it == items_.end() ? nullptr : &it->second;
}

const BusinessComponentDescriptor& Repository::at(std::string_view id) const {
  if (auto* d = find(id)) return *d;
  throw Error(ErrorCode::UnknownDescriptor, "'" + std::string(id) + "'");
}

std::size_t Conduit::buffered() const {
  std::size_t n = 0;
  for (const auto& [flow, q] : buffers) n += q.size();
  return n;
}

std::size_t StateReport::total_queue_depth() const {
  std::size_t n = 0;
  for (auto d : queue_depths) n += d;
  return n;
}

}  // namespace hetadapt::core
