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

#include "hetadapt/platform/factories.hpp"

#include "hetadapt/common/error.hpp"

namespace hetadapt::platform {

std::string_view to_string(Adapter adapter) {
  switch (adapter) {
    case Adapter::push_on_arrival: return "push_on_arrival";
    case Adapter::method_call: return "method_call";
    case Adapter::mailbox: return "mailbox";
  }
  return "?";
}

Adapter adapter_for(core::InteractionStyle style) {
  switch (style) {
    case core::InteractionStyle::event: return Adapter::push_on_arrival;
    case core::InteractionStyle::method_call: return Adapter::method_call;
    case core::InteractionStyle::mailbox: return Adapter::mailbox;
  }
  return Adapter::push_on_arrival;
}

namespace {

const net::Host& live_host(const World& world, const HostId& id) {
  if (!world.topology.has_host(id)) throw Error(ErrorCode::UnknownEntity, "host '" + id + "'");
  const auto& h = world.topology.host(id);
  if (!h.alive) throw Error(ErrorCode::UnknownEntity, "host '" + id + "' is down");
  return h;
}

HostSlot slot_of(const World& world, const net::Host& host, const std::optional<HostId>& correspondent) {
  HostSlot s{host.id, host.cls, std::nullopt};
  if (host.cls == net::HostClass::light) {
    if (!correspondent) throw Error(ErrorCode::NoCorrespondent, "light host '" + host.id + "'");
    const auto& c = live_host(world, *correspondent);
    if (!c.is_fixed()) throw Error(ErrorCode::NoCorrespondent, "'" + c.id + "' is not a fixed host");
    s.correspondent = *correspondent;
  }
  return s;
}

void require_capacity(const World& world, const std::map<HostId, double>& demand) {
  for (const auto& [h, mem] : demand) {
    const auto& host = world.topology.host(h);
    if (mem > host.free_memory())
      throw Error(ErrorCode::CapacityExceeded, "host '" + h + "' needs " + std::to_string(mem) + ", has " +
                                                   std::to_string(host.free_memory()));
  }
}

}  // namespace

PeId build_container(World& world, const ContainerSpec& spec) {
  const auto& host = live_host(world, spec.host);
  const auto* d = world.repository.find(spec.cm);
  if (!d) throw Error(ErrorCode::UnknownDescriptor, "'" + spec.cm + "'");
  if (host.cls == net::HostClass::sensor && !host.preloaded_repository.contains(spec.cm))
    throw Error(ErrorCode::ClosedWorldViolation, "'" + spec.cm + "' is not in the package of '" + host.id + "'");

  auto slot = slot_of(world, host, spec.correspondent);
  auto pe_id = spec.cm + "@" + spec.host;
  if (world.components.has_pe(pe_id)) throw Error(ErrorCode::InvalidValue, "PE '" + pe_id + "' exists");
  auto plan = plan_pe_deployment(pe_id, slot);
  require_capacity(world, memory_by_host(plan, world.params.footprints, d->memory_footprint));

  auto uc = slot.correspondent ? core::UcPlacement::deported(host.id, *slot.correspondent) : core::UcPlacement::local();
  auto pe = core::instantiate_pe(world.repository, spec.cm, host, uc, world.params.footprints,
                                 world.params.mailbox_capacity);
  pe.digest_salt = mix64(world.params.seed, fnv1a(pe.id));
  world.components.add_pe(std::move(pe));
  world.plans[pe_id] = {std::move(plan), static_cast<double>(d->memory_footprint)};
  if (slot.correspondent) world.correspondents[host.id] = *slot.correspondent;
  world.recompute_memory();
  return pe_id;
}

ConduitId build_conduit(World& world, const ConduitSpec& spec) {
  const auto& e = spec.edge;
  auto src_id = e.source.pe_id();
  auto dst_id = e.target.pe_id();
  if (!world.components.has_pe(src_id)) throw Error(ErrorCode::UnknownEndpoint, "source PE '" + src_id + "'");
  if (!world.components.has_pe(dst_id)) throw Error(ErrorCode::UnknownEndpoint, "target PE '" + dst_id + "'");
  const auto& src = world.components.pe(src_id);
  const auto& dst = world.components.pe(dst_id);
  const auto& src_host = live_host(world, src.host);
  const auto& dst_host = live_host(world, dst.host);
  if (!world.route_exists(src.host, dst.host) || !world.route_exists(dst.host, src.host))
    throw Error(ErrorCode::NoRoute, "between '" + src.host + "' and '" + dst.host + "'");
  if (e.flows.empty()) throw Error(ErrorCode::FlowTypeMismatch, "edge without flows");

  auto id = e.conduit_id();
  if (world.components.has_conduit(id)) throw Error(ErrorCode::PortBusy, "conduit '" + id + "' exists");
  auto plan = plan_conduit_deployment(id, slot_of(world, src_host, spec.source_correspondent),
                                      slot_of(world, dst_host, spec.target_correspondent));
  require_capacity(world, memory_by_host(plan, world.params.footprints));

  auto out_port = core::free_port(src.out_ports, src.out_bound, e.flows.front());
  auto in_port = core::free_port(dst.in_ports, dst.in_bound, e.flows.front());
  if (!out_port) throw Error(ErrorCode::PortBusy, "no free '" + e.flows.front() + "' output on '" + src_id + "'");
  if (!in_port) throw Error(ErrorCode::PortBusy, "no free '" + e.flows.front() + "' input on '" + dst_id + "'");

  core::Conduit c;
  c.id = id;
  c.flows = e.flows;
  c.transport_policy = e.policy;
  if (auto h = plan.host_of(net::Fragment::CONDUIT_UC, Side::in); h && *h != src.host)
    c.uc = core::UcPlacement::deported(src.host, *h);
  world.components.connect(src_id, *out_port, std::move(c), dst_id, *in_port);
  world.plans[id] = {std::move(plan), 0};
  if (spec.source_correspondent && src_host.cls == net::HostClass::light)
    world.correspondents[src_host.id] = *spec.source_correspondent;
  if (spec.target_correspondent && dst_host.cls == net::HostClass::light)
    world.correspondents[dst_host.id] = *spec.target_correspondent;
  world.recompute_memory();
  return id;
}

void destroy_container(World& world, const PeId& id) {
  if (world.components.has_pe(id)) world.remove_pe(id, "container_destroyed");
}

void destroy_conduit(World& world, const ConduitId& id) {
  if (world.components.has_conduit(id)) world.remove_conduit(id, "conduit_destroyed");
}

}  // namespace hetadapt::platform
