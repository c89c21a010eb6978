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

#include "hetadapt/core/components.hpp"

#include <algorithm>

#include "hetadapt/common/error.hpp"

namespace hetadapt::core {

std::vector<net::FragmentDemand> local_pe_fragments(const BusinessComponentDescriptor& d,
                                                    const UcPlacement& uc) {
  return {{net::Fragment::CM, static_cast<double>(d.memory_footprint)},
          {net::Fragment::UE},
          {net::Fragment::US},
          {uc.split ? net::Fragment::UC_stub : net::Fragment::UC_full}};
}

ElementaryProcessor instantiate_pe(const Repository& repository, std::string_view cm,
                                   const net::Host& host, UcPlacement uc,
                                   const net::Footprints& footprints,
                                   std::size_t mailbox_capacity) {
  const auto* d = repository.find(cm);
  if (d == nullptr) throw Error(ErrorCode::UnknownDescriptor, "'" + std::string(cm) + "'");
  if (host.cls == net::HostClass::sensor && !host.preloaded_repository.contains(d->id))
    throw Error(ErrorCode::UnknownDescriptor,
                "'" + d->id + "' is not in the package of sensor '" + host.id + "'");
  if (d->category == Category::sensing && !host.capabilities.contains(d->capability))
    throw Error(ErrorCode::CapabilityMismatch,
                "'" + d->id + "' needs " + d->capability + " on host '" + host.id + "'");
  if (uc.split && uc.stub_on != host.id)
    throw Error(ErrorCode::InvalidValue, "UC stub of '" + d->id + "' must sit on '" + host.id + "'");
  auto fragments = local_pe_fragments(*d, uc);
  if (!net::check_capacity(host, fragments, footprints))
    throw Error(ErrorCode::CapacityExceeded, "'" + d->id + "' does not fit on '" + host.id + "'");

  ElementaryProcessor pe;
  pe.id = d->id + "@" + host.id;
  pe.cm = d->id;
  pe.host = host.id;
  pe.style = d->interaction_style;
  pe.uc = std::move(uc);
  pe.in_ports = d->input_flows;
  pe.out_ports = d->output_flows;
  pe.input_unit.resize(pe.in_ports.size());
  pe.output_unit.resize(pe.out_ports.size());
  pe.in_bound.resize(pe.in_ports.size());
  pe.out_bound.resize(pe.out_ports.size());
  pe.mailbox_capacity = mailbox_capacity;
  return pe;
}

namespace {

void emit(ElementaryProcessor& pe, const BusinessComponentDescriptor& d, Tick tick,
          std::uint64_t upstream_digest, StepResult& result) {
  for (std::size_t port = 0; port < pe.out_ports.size(); ++port) {
    const auto& flow = pe.out_ports[port];
    DataFrame frame;
    frame.flow_id = flow;
    frame.seq = pe.next_seq[flow]++;
    frame.payload_size = d.frame_bytes;
    frame.produced_tick = tick;
    frame.producer = pe.id;
    frame.payload_digest = mix64(mix64(upstream_digest, fnv1a(pe.id)), mix64(fnv1a(flow), frame.seq));
    pe.output_unit[port].push_back(frame);
    result.produced.emplace_back(port, std::move(frame));
  }
}

bool passes(const Transform& t, std::uint64_t processed_total, std::uint64_t digest) {
  switch (t.kind) {
    case Transform::Kind::passthrough: return true;
    case Transform::Kind::downsample: return processed_total % static_cast<std::uint64_t>(t.param) == 0;
    case Transform::Kind::threshold: return static_cast<int>(digest % 100) < t.param;
  }
  return true;
}

}  // namespace

StepResult pe_step(ElementaryProcessor& pe, const BusinessComponentDescriptor& d, Tick tick) {
  StepResult result;
  if (pe.state != ComponentState::running) return result;

  if (d.is_source()) {
    if (tick % d.period == 0) {
      ++result.activations;
      result.energy_charge += d.cpu_cost;
      emit(pe, d, tick, pe.digest_salt, result);
    }
    return result;
  }

  for (std::size_t port = 0; port < pe.input_unit.size(); ++port) {
    auto& queue = pe.input_unit[port];
    std::size_t budget = pe.style == InteractionStyle::event ? queue.size() : std::min<std::size_t>(1, queue.size());
    for (std::size_t i = 0; i < budget; ++i) {
      DataFrame in = std::move(queue.front());
      queue.pop_front();
      ++result.processed;
      ++result.activations;
      result.energy_charge += d.cpu_cost;
      ++pe.processed_total;
      ++pe.processed_window;
      if (passes(d.transform, pe.processed_total, in.payload_digest))
        emit(pe, d, tick, mix64(in.payload_digest, fnv1a(d.id)), result);
    }
  }
  return result;
}

AcceptResult accept_frame(ElementaryProcessor& pe, std::size_t in_port, DataFrame frame) {
  auto& queue = pe.input_unit.at(in_port);
  if (pe.style == InteractionStyle::mailbox && queue.size() >= pe.mailbox_capacity) {
    ++pe.drops_window;
    return AcceptResult::rejected;
  }
  queue.push_back(std::move(frame));
  return AcceptResult::queued;
}

void conduit_accept(Conduit& conduit, DataFrame frame) {
  auto flow = frame.flow_id;
  conduit.buffers[flow].push_back({conduit.arrivals++, std::move(frame)});
}

ConduitStepResult conduit_step(Conduit& conduit, bool route_available) {
  ConduitStepResult result;
  if (conduit.state != ComponentState::running) return result;
  if (!route_available) {
    conduit.blocked = result.blocked = true;
    return result;
  }
  conduit.blocked = false;

  std::vector<BufferedFrame> out;
  switch (conduit.transport_policy) {
    case TransportPolicy::fifo: {
      for (auto& [flow, q] : conduit.buffers) {
        for (auto& f : q) out.push_back(std::move(f));
        q.clear();
      }
      break;
    }
    case TransportPolicy::realtime_drop: {
      for (auto& [flow, q] : conduit.buffers) {
        if (q.empty()) continue;
        result.dropped += q.size() - 1;
        out.push_back(std::move(q.back()));
        q.clear();
      }
      break;
    }
    case TransportPolicy::synchronized: {
      // Release complete equal-seq groups in seq order. A partial group older
      // than a released one can never complete (per-flow seq is monotonic).
      while (true) {
        std::optional<std::uint64_t> group;
        const auto& first = conduit.buffers[conduit.flows.front()];
        for (const auto& candidate : first) {
          bool complete = true;
          for (const auto& flow : conduit.flows) {
            const auto& q = conduit.buffers[flow];
            if (std::none_of(q.begin(), q.end(),
                             [&](const BufferedFrame& b) { return b.frame.seq == candidate.frame.seq; })) {
              complete = false;
              break;
            }
          }
          if (complete) {
            group = candidate.frame.seq;
            break;
          }
        }
        if (!group) break;
        for (const auto& flow : conduit.flows) {
          auto& q = conduit.buffers[flow];
          while (!q.empty() && q.front().frame.seq < *group) {
            q.pop_front();
            ++result.dropped;
          }
          out.push_back(std::move(q.front()));
          q.pop_front();
        }
      }
      break;
    }
  }
  if (conduit.transport_policy != TransportPolicy::synchronized) {
    std::sort(out.begin(), out.end(),
              [](const BufferedFrame& a, const BufferedFrame& b) { return a.arrival < b.arrival; });
  }
  for (auto& b : out) result.delivered.push_back(std::move(b.frame));
  conduit.delivered_window += result.delivered.size();
  conduit.drops_window += result.dropped;
  return result;
}

namespace {

void transition(ComponentState& state, ControlCommand::Kind kind, const std::string& target) {
  using K = ControlCommand::Kind;
  using S = ComponentState;
  if (kind == K::start) {
    if (state == S::created || state == S::stopped) {
      state = S::running;
      return;
    }
  } else if (kind == K::stop) {
    if (state == S::created || state == S::running) {
      state = S::stopped;
      return;
    }
  } else if (kind == K::set_param) {
    if (state != S::failed) return;
  } else {
    return;
  }
  throw Error(ErrorCode::InvalidTransition,
              std::string(to_string(kind)) + " on " + std::string(to_string(state)) + " '" + target + "'");
}

}  // namespace

StateReport probe(const ElementaryProcessor& pe) {
  StateReport r;
  r.source = pe.id;
  r.state = pe.state;
  for (const auto& q : pe.input_unit) r.queue_depths.push_back(q.size());
  r.processed_last_window = pe.processed_window;
  r.drops_last_window = pe.drops_window;
  return r;
}

StateReport probe(const Conduit& conduit) {
  StateReport r;
  r.source = conduit.id;
  r.state = conduit.state;
  for (const auto& flow : conduit.flows) {
    auto it = conduit.buffers.find(flow);
    r.queue_depths.push_back(it == conduit.buffers.end() ? 0 : it->second.size());
  }
  r.processed_last_window = conduit.delivered_window;
  r.drops_last_window = conduit.drops_window;
  r.blocked = conduit.blocked;
  return r;
}

StateReport apply_command(ElementaryProcessor& pe, const ControlCommand& command) {
  transition(pe.state, command.kind, pe.id);
  if (command.kind == ControlCommand::Kind::set_param) pe.params[command.key] = command.value;
  auto report = probe(pe);
  if (command.kind == ControlCommand::Kind::probe_state) pe.processed_window = pe.drops_window = 0;
  return report;
}

StateReport apply_command(Conduit& conduit, const ControlCommand& command) {
  transition(conduit.state, command.kind, conduit.id);
  if (command.kind == ControlCommand::Kind::set_param) conduit.params[command.key] = command.value;
  auto report = probe(conduit);
  if (command.kind == ControlCommand::Kind::probe_state) conduit.delivered_window = conduit.drops_window = 0;
  return report;
}

std::optional<std::size_t> free_port(const std::vector<FlowId>& ports,
                                     const std::vector<std::optional<ConduitId>>& bound,
                                     const FlowId& flow) {
  for (std::size_t i = 0; i < ports.size(); ++i)
    if (ports[i] == flow && !bound[i]) return i;
  return std::nullopt;
}

void ComponentTopology::add_pe(ElementaryProcessor pe) {
  if (pes_.contains(pe.id)) throw Error(ErrorCode::InvalidValue, "duplicate PE '" + pe.id + "'");
  auto id = pe.id;
  pes_.emplace(std::move(id), std::move(pe));
}

ElementaryProcessor& ComponentTopology::pe(const PeId& id) {
  auto it = pes_.find(id);
  if (it == pes_.end()) throw Error(ErrorCode::UnknownTarget, "PE '" + id + "'");
  return it->second;
}

const ElementaryProcessor& ComponentTopology::pe(const PeId& id) const {
  auto it = pes_.find(id);
  if (it == pes_.end()) throw Error(ErrorCode::UnknownTarget, "PE '" + id + "'");
  return it->second;
}

Conduit& ComponentTopology::conduit(const ConduitId& id) {
  auto it = conduits_.find(id);
  if (it == conduits_.end()) throw Error(ErrorCode::UnknownTarget, "conduit '" + id + "'");
  return it->second;
}

const Conduit& ComponentTopology::conduit(const ConduitId& id) const {
  auto it = conduits_.find(id);
  if (it == conduits_.end()) throw Error(ErrorCode::UnknownTarget, "conduit '" + id + "'");
  return it->second;
}

namespace {

std::size_t bind_port(const std::vector<FlowId>& ports, const std::vector<std::optional<ConduitId>>& bound,
                      const std::vector<std::size_t>& taken, const FlowId& flow, const std::string& where) {
  bool any = false;
  for (std::size_t i = 0; i < ports.size(); ++i) {
    if (ports[i] != flow) continue;
    any = true;
    if (!bound[i] && std::find(taken.begin(), taken.end(), i) == taken.end()) return i;
  }
  if (!any) throw Error(ErrorCode::FlowTypeMismatch, where + " has no port for flow '" + flow + "'");
  throw Error(ErrorCode::PortBusy, where + ": every '" + flow + "' port is bound");
}

}  // namespace

Conduit& ComponentTopology::connect(const PeId& source_pe, std::size_t out_port, Conduit conduit,
                                    const PeId& target_pe, std::size_t in_port) {
  auto src_it = pes_.find(source_pe);
  auto dst_it = pes_.find(target_pe);
  if (src_it == pes_.end()) throw Error(ErrorCode::DanglingEndpoint, "source PE '" + source_pe + "'");
  if (dst_it == pes_.end()) throw Error(ErrorCode::DanglingEndpoint, "target PE '" + target_pe + "'");
  if (conduits_.contains(conduit.id)) throw Error(ErrorCode::PortBusy, "conduit '" + conduit.id + "' exists");
  if (conduit.flows.empty()) throw Error(ErrorCode::FlowTypeMismatch, "conduit '" + conduit.id + "' has no flow");
  auto& src = src_it->second;
  auto& dst = dst_it->second;
  if (out_port >= src.out_ports.size())
    throw Error(ErrorCode::DanglingEndpoint, "'" + source_pe + "' has no output port " + std::to_string(out_port));
  if (in_port >= dst.in_ports.size())
    throw Error(ErrorCode::DanglingEndpoint, "'" + target_pe + "' has no input port " + std::to_string(in_port));
  if (src.out_ports[out_port] != conduit.flows.front())
    throw Error(ErrorCode::FlowTypeMismatch, "port " + source_pe + ":" + std::to_string(out_port) + " carries '" +
                                                 src.out_ports[out_port] + "', conduit carries '" +
                                                 conduit.flows.front() + "'");
  if (dst.in_ports[in_port] != conduit.flows.front())
    throw Error(ErrorCode::FlowTypeMismatch, "port " + target_pe + ":" + std::to_string(in_port) + " carries '" +
                                                 dst.in_ports[in_port] + "', conduit carries '" +
                                                 conduit.flows.front() + "'");
  if (src.out_bound[out_port]) throw Error(ErrorCode::PortBusy, source_pe + ":" + std::to_string(out_port));
  if (dst.in_bound[in_port]) throw Error(ErrorCode::PortBusy, target_pe + ":" + std::to_string(in_port));

  std::vector<std::size_t> out_ports{out_port};
  std::vector<std::size_t> in_ports{in_port};
  for (std::size_t i = 1; i < conduit.flows.size(); ++i) {
    out_ports.push_back(bind_port(src.out_ports, src.out_bound, out_ports, conduit.flows[i], source_pe));
    in_ports.push_back(bind_port(dst.in_ports, dst.in_bound, in_ports, conduit.flows[i], target_pe));
  }

  conduit.source = {source_pe, out_port};
  conduit.target = {target_pe, in_port};
  conduit.source_ports = out_ports;
  conduit.target_ports = in_ports;
  conduit.source_host = src.host;
  conduit.target_host = dst.host;
  for (auto p : out_ports) src.out_bound[p] = conduit.id;
  for (auto p : in_ports) dst.in_bound[p] = conduit.id;
  auto id = conduit.id;
  return conduits_.emplace(std::move(id), std::move(conduit)).first->second;
}

std::vector<DataFrame> ComponentTopology::remove_conduit(const ConduitId& id) {
  auto it = conduits_.find(id);
  if (it == conduits_.end()) throw Error(ErrorCode::UnknownTarget, "conduit '" + id + "'");
  auto& c = it->second;
  if (auto s = pes_.find(c.source.pe); s != pes_.end())
    for (auto p : c.source_ports) s->second.out_bound[p].reset();
  if (auto t = pes_.find(c.target.pe); t != pes_.end())
    for (auto p : c.target_ports) t->second.in_bound[p].reset();
  std::vector<BufferedFrame> all;
  for (auto& [flow, q] : c.buffers)
    for (auto& b : q) all.push_back(std::move(b));
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.arrival < b.arrival; });
  std::vector<DataFrame> frames;
  for (auto& b : all) frames.push_back(std::move(b.frame));
  conduits_.erase(it);
  return frames;
}

ElementaryProcessor ComponentTopology::remove_pe(const PeId& id) {
  auto it = pes_.find(id);
  if (it == pes_.end()) throw Error(ErrorCode::UnknownTarget, "PE '" + id + "'");
  for (const auto& b : it->second.in_bound)
    if (b) throw Error(ErrorCode::DanglingEndpoint, "PE '" + id + "' still bound to '" + *b + "'");
  for (const auto& b : it->second.out_bound)
    if (b) throw Error(ErrorCode::DanglingEndpoint, "PE '" + id + "' still bound to '" + *b + "'");
  ElementaryProcessor pe = std::move(it->second);
  pes_.erase(it);
  return pe;
}

}  // namespace hetadapt::core
