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

#include "hetadapt/platform/world.hpp"

#include <algorithm>

namespace hetadapt::platform {

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::STATE_REPORT: return "STATE_REPORT";
    case MessageKind::COMMAND: return "COMMAND";
    case MessageKind::CREATE_CONTAINER: return "CREATE_CONTAINER";
    case MessageKind::DESTROY_CONTAINER: return "DESTROY_CONTAINER";
    case MessageKind::CREATE_CONDUIT: return "CREATE_CONDUIT";
    case MessageKind::DESTROY_CONDUIT: return "DESTROY_CONDUIT";
    case MessageKind::ROUTE_ALERT: return "ROUTE_ALERT";
    case MessageKind::ROUTE_INFO: return "ROUTE_INFO";
    case MessageKind::MIGRATE_UC: return "MIGRATE_UC";
    case MessageKind::DATA: return "DATA";
  }
  return "?";
}

World::World(Params p, net::Topology topo, core::Repository repo)
    : params(std::move(p)),
      topology(std::move(topo)),
      routing(params.hello_miss),
      repository(std::move(repo)),
      transport(topology, params.energy,
                [this](const HostId& at, const HostId& dst) { return routing.next_hop(at, dst); }) {
  topology.recompute();
  routing.bootstrap(topology);
  for (const auto& [id, host] : topology.hosts()) reported_energy_[id] = host.energy;
}

void World::record(std::string kind, const HostId& host, Details details) {
  log.append(tick, std::move(kind), host, std::move(details));
}

namespace {

Details summarize(const PlatformMessage& m, const HostId& dst, Priority priority) {
  Details d{{"to", dst}, {"priority", std::string(priority == Priority::priority ? "priority" : "normal")}};
  if (m.request) d["request"] = static_cast<std::int64_t>(m.request);
  switch (m.kind) {
    case MessageKind::CREATE_CONTAINER:
    case MessageKind::DESTROY_CONTAINER:
      d["cm"] = m.node.cm;
      d["target"] = m.node.host;
      d["subject"] = m.node.pe_id();
      break;
    case MessageKind::CREATE_CONDUIT:
    case MessageKind::DESTROY_CONDUIT:
      d["subject"] = m.edge.conduit_id();
      d["policy"] = std::string(core::to_string(m.edge.policy));
      break;
    case MessageKind::COMMAND:
      d["subject"] = m.command.target;
      d["command"] = std::string(core::to_string(m.command.kind));
      break;
    case MessageKind::STATE_REPORT:
      d["subject"] = m.report.source;
      d["state"] = std::string(core::to_string(m.report.state));
      if (m.ack) d["ack"] = true;
      if (m.error) d["error"] = std::string(to_string(*m.error));
      break;
    case MessageKind::ROUTE_ALERT:
    case MessageKind::ROUTE_INFO:
      d["owner"] = m.notice.owner;
      d["destination"] = m.notice.destination;
      if (m.notice.after) d["next_hop"] = m.notice.after->next_hop;
      break;
    case MessageKind::MIGRATE_UC:
      d["light"] = m.light_host;
      d["from"] = m.old_correspondent;
      d["fragments"] = static_cast<std::int64_t>(m.snapshots.size());
      break;
    case MessageKind::DATA: break;
  }
  return d;
}

}  // namespace

bool World::send(const HostId& src, const HostId& dst, PlatformMessage message, Priority priority) {
  message.sender = src;
  record(std::string(to_string(message.kind)), src, summarize(message, dst, priority));
  auto kind = message.kind;
  auto request = message.request;
  auto result = transport.send(src, dst, std::move(message), params.control_bytes, priority, tick);
  using Status = net::Transport<PlatformMessage>::SendStatus;
  if (result.status == Status::delivered) {
    inbox.push(tick, priority, src, std::move(*result.delivered));
    return true;
  }
  if (result.status == Status::dropped) {
    Details d{{"kind", std::string(to_string(kind))},
              {"reason", std::string(net::to_string(*result.reason))},
              {"to", dst}};
    if (request) d["request"] = static_cast<std::int64_t>(request);
    record("message_dropped", src, std::move(d));
    return false;
  }
  return true;
}

void World::deliver_messages() {
  std::vector<net::Dropped<PlatformMessage>> drops;
  auto arrived = transport.deliver_due(tick, drops);
  for (auto& msg : arrived) {
    if (msg.payload.kind == MessageKind::DATA) {
      deliver_frame(msg.payload.conduit, msg.payload.flow_index, std::move(msg.payload.frame));
    } else {
      auto src = msg.src;
      auto priority = msg.priority;
      inbox.push(tick, priority, std::move(src), std::move(msg));
    }
  }
  for (auto& d : drops) {
    const auto& p = d.message.payload;
    if (p.kind == MessageKind::DATA) {
      drop_frame(p.frame, net::to_string(d.reason), p.conduit);
    } else {
      Details details{{"kind", std::string(to_string(p.kind))},
                      {"reason", std::string(net::to_string(d.reason))},
                      {"to", d.message.dst},
                      {"at", d.message.at}};
      if (p.request) details["request"] = static_cast<std::int64_t>(p.request);
      record("message_dropped", d.message.src, std::move(details));
    }
  }
}

void World::drop_frame(const core::DataFrame& frame, std::string_view reason, const std::string& where) {
  ++frames.dropped;
  ++frames.dropped_by_reason[std::string(reason)];
  record("frame_dropped", "",
         {{"reason", std::string(reason)},
          {"where", where},
          {"flow", frame.flow_id},
          {"seq", static_cast<std::int64_t>(frame.seq)},
          {"count", std::int64_t{1}}});
}

void World::deliver_frame(const ConduitId& conduit_id, std::size_t flow_index, core::DataFrame frame) {
  auto it = components.conduits().find(conduit_id);
  if (it == components.conduits().end()) {
    drop_frame(frame, "conduit_missing", conduit_id);
    return;
  }
  const auto& c = it->second;
  auto& pe = components.pe(c.target.pe);
  if (pe.state == core::ComponentState::failed) {
    drop_frame(frame, "host_dead", conduit_id);
    return;
  }
  auto port = c.target_ports.at(flow_index);
  auto flow = frame.flow_id;
  auto seq = frame.seq;
  if (core::accept_frame(pe, port, frame) == core::AcceptResult::rejected) {
    record("backpressure", pe.host, {{"pe", pe.id}, {"port", static_cast<std::int64_t>(port)}});
    drop_frame(frame, "backpressure", conduit_id);
    return;
  }
  ++frames.delivered;
  record("frame_delivered", pe.host,
         {{"conduit", conduit_id}, {"pe", pe.id}, {"flow", flow}, {"seq", static_cast<std::int64_t>(seq)}});
}

void World::forward_frame(const ConduitId& conduit, std::size_t flow_index, core::DataFrame frame,
                          const HostId& from, const HostId& to) {
  PlatformMessage m;
  m.kind = MessageKind::DATA;
  m.sender = from;
  m.conduit = conduit;
  m.flow_index = flow_index;
  m.frame = frame;
  auto bytes = static_cast<double>(frame.payload_size);
  auto result = transport.send(from, to, std::move(m), bytes, Priority::normal, tick);
  if (result.status == net::Transport<PlatformMessage>::SendStatus::dropped)
    drop_frame(frame, net::to_string(*result.reason), conduit);
}

void World::step_components() {
  for (auto& [id, pe] : components.pes()) {
    if (pe.state == core::ComponentState::failed) continue;
    auto result = core::pe_step(pe, repository.at(pe.cm), tick);
    frames.emitted += result.produced.size();
    if (result.energy_charge > 0)
      net::charge_energy(topology.host(pe.host), net::EnergyKind::cpu, result.energy_charge);
  }

  for (auto& [id, pe] : components.pes()) {
    if (pe.state == core::ComponentState::failed) continue;
    for (std::size_t port = 0; port < pe.output_unit.size(); ++port) {
      auto& out = pe.output_unit[port];
      if (out.empty()) continue;
      if (pe.out_bound[port]) {
        auto& conduit = components.conduit(*pe.out_bound[port]);
        for (auto& f : out) core::conduit_accept(conduit, std::move(f));
      } else {
        for (const auto& f : out) drop_frame(f, "unconnected", pe.id);
      }
      out.clear();
    }
  }

  for (auto& [id, c] : components.conduits()) {
    bool route = route_exists(c.source_host, c.target_host);
    bool was_blocked = c.blocked;
    auto result = core::conduit_step(c, route);
    if (c.state == core::ComponentState::running && result.blocked != was_blocked)
      record("backpressure", c.source_host, {{"conduit", id}, {"blocked", result.blocked}});
    if (result.dropped > 0) {
      std::string reason = c.transport_policy == core::TransportPolicy::synchronized ? "sync_stale" : "realtime_drop";
      frames.dropped += result.dropped;
      frames.dropped_by_reason[reason] += result.dropped;
      record("frame_dropped", c.source_host,
             {{"reason", reason}, {"where", id}, {"count", static_cast<std::int64_t>(result.dropped)}});
    }
    for (auto& frame : result.delivered) {
      auto pos = std::find(c.flows.begin(), c.flows.end(), frame.flow_id);
      auto index = static_cast<std::size_t>(pos - c.flows.begin());
      if (c.source_host == c.target_host)
        deliver_frame(id, index, std::move(frame));
      else
        forward_frame(id, index, std::move(frame), c.source_host, c.target_host);
    }
  }
}

void World::remove_conduit(const ConduitId& id, std::string_view reason) {
  for (const auto& f : components.remove_conduit(id)) drop_frame(f, reason, id);
  auto in_flight = transport.extract_if([&](const Envelope& m) {
    return m.payload.kind == MessageKind::DATA && m.payload.conduit == id;
  });
  for (const auto& m : in_flight) drop_frame(m.payload.frame, reason, id);
  plans.erase(id);
  uc_snapshots.erase(snapshot_key(id, Side::in));
  uc_snapshots.erase(snapshot_key(id, Side::out));
  recompute_memory();
}

void World::remove_pe(const PeId& id, std::string_view reason) {
  auto pe = components.remove_pe(id);
  for (const auto& out : pe.output_unit)
    for (const auto& f : out) drop_frame(f, reason, id);
  plans.erase(id);
  uc_snapshots.erase(snapshot_key(id, Side::none));
  recompute_memory();
}

void World::recompute_memory() {
  for (const auto& [id, host] : topology.hosts()) topology.host(id).memory_used = 0;
  for (const auto& [subject, deployed] : plans)
    for (const auto& p : deployed.plan.placements)
      if (topology.has_host(p.host))
        topology.host(p.host).memory_used += params.footprints.of(p.fragment, deployed.cm_footprint);
}

void World::reconcile_energy() {
  for (const auto& [id, host] : topology.hosts()) {
    auto& before = reported_energy_[id];
    const auto& now = host.energy;
    if (now == before) continue;
    record("energy", id,
           {{"tx", now.tx - before.tx},
            {"rx", now.rx - before.rx},
            {"cpu", now.cpu - before.cpu},
            {"drained", now.drained - before.drained},
            {"battery", host.battery()}});
    before = now;
  }
  std::vector<HostId> exhausted;
  for (const auto& [id, host] : topology.hosts())
    if (host.alive && !host.is_fixed() && host.battery() <= 0) exhausted.push_back(id);
  for (const auto& id : exhausted) kill_host(id, "battery");
}

void World::kill_host(const HostId& host, std::string_view cause) {
  if (!topology.host(host).alive) return;
  topology.kill_host(host);
  routing.on_host_died(host);
  for (auto& [id, pe] : components.pes())
    if (pe.host == host) pe.state = core::ComponentState::failed;
  for (auto& [id, c] : components.conduits())
    if (c.source_host == host || c.target_host == host) c.state = core::ComponentState::failed;
  record("host_died", host, {{"cause", std::string(cause)}});
}

void World::restore_host(const HostId& host) {
  topology.apply(net::topology_event::Restore{host, std::nullopt});
  routing.on_host_restored(host);
}

std::uint64_t World::buffered_frames() const {
  std::uint64_t n = 0;
  for (const auto& [id, pe] : components.pes())
    for (const auto& out : pe.output_unit) n += out.size();
  for (const auto& [id, c] : components.conduits()) n += c.buffered();
  n += transport.count_if([](const Envelope& m) { return m.payload.kind == MessageKind::DATA; });
  return n;
}

HostSlot World::slot(const HostId& host) const {
  HostSlot s{host, topology.host(host).cls, std::nullopt};
  if (auto it = correspondents.find(host); it != correspondents.end()) s.correspondent = it->second;
  return s;
}

std::optional<HostId> World::factory_host(const HostId& host) const {
  if (!topology.has_host(host)) return std::nullopt;
  if (topology.host(host).cls != net::HostClass::light) return host;
  if (auto it = correspondents.find(host); it != correspondents.end()) return it->second;
  return std::nullopt;
}

qos::BoundConfiguration World::deployed() const {
  qos::BoundConfiguration out;
  for (const auto& [id, pe] : components.pes())
    if (pe.state != core::ComponentState::failed) out.nodes.push_back({pe.cm, pe.host});
  for (const auto& [id, c] : components.conduits()) {
    if (c.state == core::ComponentState::failed) continue;
    const auto& s = components.pe(c.source.pe);
    const auto& t = components.pe(c.target.pe);
    out.edges.push_back({{s.cm, s.host}, {t.cm, t.host}, c.transport_policy, c.flows});
  }
  return out;
}

qos::ContextSnapshot World::snapshot(const HostId& supervisor) const {
  qos::ContextSnapshot ctx;
  ctx.tick = tick;
  ctx.supervisor = supervisor;
  for (const auto& [id, host] : topology.hosts()) {
    auto copy = host;
    copy.memory_used = 0;
    ctx.hosts.emplace(id, std::move(copy));
    if (host.alive) ctx.tables.emplace(id, routing.table(id));
  }
  for (const auto& [pair, link] : topology.links())
    if (link.state == net::LinkState::up) ctx.links.emplace(pair, link.kind);
  ctx.repository = repository;
  ctx.params.energy = params.energy;
  ctx.params.footprints = params.footprints;
  ctx.params.control_bytes = params.control_bytes;
  ctx.params.uc_report_period = params.uc_report_period;
  return ctx;
}

bool World::route_exists(const HostId& from, const HostId& to) const {
  if (!topology.host(from).alive || !topology.host(to).alive) return false;
  if (from == to) return true;
  return routing.next_hop(from, to).has_value();
}

std::string World::snapshot_key(const std::string& subject, Side side) {
  return subject + "|" + std::string(to_string(side));
}

}  // namespace hetadapt::platform
