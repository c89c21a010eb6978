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

#include "hetadapt/platform/services.hpp"

#include <algorithm>

#include "hetadapt/common/error.hpp"

namespace hetadapt::platform {

std::string_view to_string(Trigger trigger) {
  switch (trigger) {
    case Trigger::initial: return "initial";
    case Trigger::alert: return "alert";
    case Trigger::info: return "info";
    case Trigger::fallback: return "fallback";
    case Trigger::retry: return "retry";
  }
  return "?";
}

namespace {

net::Fragment logic_fragment(Side side) { return side == Side::none ? net::Fragment::UC_logic : net::Fragment::CONDUIT_UC; }

/// (subject, side, stub host, logic host) for every split control unit.
struct SplitUc {
  std::string subject;
  Side side;
  HostId stub;
  HostId logic;
};

std::vector<SplitUc> split_ucs(const World& world) {
  std::vector<SplitUc> out;
  for (const auto& [subject, deployed] : world.plans)
    for (const auto& p : deployed.plan.placements)
      if (p.fragment == net::Fragment::UC_stub)
        if (auto logic = deployed.plan.host_of(logic_fragment(p.side), p.side))
          out.push_back({subject, p.side, p.host, *logic});
  return out;
}

std::optional<core::StateReport> probe_subject(const World& world, const std::string& subject) {
  if (world.components.has_pe(subject)) return core::probe(world.components.pe(subject));
  if (world.components.has_conduit(subject)) return core::probe(world.components.conduit(subject));
  return std::nullopt;
}

std::string describe(const qos::Binding& binding) {
  std::string out;
  for (const auto& [node, host] : binding.node_hosts) {
    if (!out.empty()) out += ",";
    out += node + "=" + host;
  }
  return out;
}

}  // namespace

Platform::Platform(World& world, qos::ConfigurationFamily family) : world_(world), family_(std::move(family)) {}

void Platform::routing_phase() {
  world_.routing.begin_tick();
  for (const auto& [id, host] : world_.topology.hosts()) {
    if (!host.alive) continue;
    auto before = world_.routing.table(id);
    auto delta = world_.routing.routing_tick(id, world_.topology);
    if (delta.empty()) continue;
    for (auto& notice : routing::diff_routes(before, world_.routing.table(id))) {
      PlatformMessage m;
      m.kind = notice.kind == routing::NoticeKind::alert ? MessageKind::ROUTE_ALERT : MessageKind::ROUTE_INFO;
      auto priority = notice.priority();
      m.notice = std::move(notice);
      world_.send(id, supervisor(), std::move(m), priority);
    }
  }
}

void Platform::platform_phase() {
  send_state_reports();
  process_inbox();
  supervise();
  process_inbox();
}

void Platform::process_inbox() {
  while (auto message = world_.inbox.pop_next(world_.tick)) dispatch(*message);
}

void Platform::dispatch(const Envelope& message) {
  const auto& at = message.dst;
  if (!world_.topology.host(at).alive) {
    world_.record("message_dropped", message.src,
                  {{"kind", std::string(to_string(message.payload.kind))}, {"reason", std::string("host_dead")}, {"to", at}});
    return;
  }
  switch (message.payload.kind) {
    case MessageKind::CREATE_CONTAINER:
    case MessageKind::DESTROY_CONTAINER:
    case MessageKind::CREATE_CONDUIT:
    case MessageKind::DESTROY_CONDUIT: on_factory_request(message); break;
    case MessageKind::COMMAND: on_command(message); break;
    case MessageKind::MIGRATE_UC: on_migrate(message); break;
    case MessageKind::ROUTE_ALERT:
    case MessageKind::ROUTE_INFO: on_notice(message); break;
    case MessageKind::STATE_REPORT:
      if (message.payload.ack) {
        if (at == supervisor()) on_ack(message);
      } else {
        for (const auto& s : message.payload.snapshots) world_.uc_snapshots[World::snapshot_key(s.subject, s.side)] = s;
      }
      break;
    case MessageKind::DATA: break;
  }
}

void Platform::ack(const Envelope& request, const HostId& at, std::optional<core::StateReport> report,
                   const Error* error) {
  PlatformMessage m;
  m.kind = MessageKind::STATE_REPORT;
  m.ack = true;
  m.request = request.payload.request;
  if (report) m.report = std::move(*report);
  if (error) {
    m.error = error->code();
    m.error_text = error->what();
  }
  const auto& to = request.payload.reply_to.empty() ? request.src : request.payload.reply_to;
  world_.send(at, to, std::move(m));
}

void Platform::on_factory_request(const Envelope& message) {
  const auto& p = message.payload;
  const auto& at = message.dst;
  try {
    std::optional<core::StateReport> report;
    switch (p.kind) {
      case MessageKind::CREATE_CONTAINER: {
        auto id = build_container(world_, {p.node.cm, p.node.host, p.correspondent});
        report = core::probe(world_.components.pe(id));
        break;
      }
      case MessageKind::CREATE_CONDUIT: {
        auto id = build_conduit(world_, {p.edge, p.correspondent, p.target_correspondent});
        report = core::probe(world_.components.conduit(id));
        break;
      }
      case MessageKind::DESTROY_CONTAINER: destroy_container(world_, p.node.pe_id()); break;
      case MessageKind::DESTROY_CONDUIT: destroy_conduit(world_, p.edge.conduit_id()); break;
      default: break;
    }
    ack(message, at, std::move(report));
  } catch (const Error& e) {
    ack(message, at, std::nullopt, &e);
  }
}

void Platform::on_command(const Envelope& message) {
  const auto& p = message.payload;
  const auto& at = message.dst;
  const auto& target = p.command.target;
  core::UcPlacement uc;
  if (world_.components.has_pe(target)) {
    uc = world_.components.pe(target).uc;
  } else if (world_.components.has_conduit(target)) {
    uc = world_.components.conduit(target).uc;
  } else {
    Error e(ErrorCode::UnknownTarget, "'" + target + "'");
    ack(message, at, std::nullopt, &e);
    return;
  }
  if (uc.split && at == uc.logic_on && at != uc.stub_on) {
    // The deported logic relays to the stub that drives the component.
    auto relay = p;
    world_.send(at, uc.stub_on, std::move(relay));
    return;
  }
  try {
    auto report = world_.components.has_pe(target) ? core::apply_command(world_.components.pe(target), p.command)
                                                   : core::apply_command(world_.components.conduit(target), p.command);
    ack(message, at, std::move(report));
  } catch (const Error& e) {
    ack(message, at, std::nullopt, &e);
  }
}

void Platform::on_migrate(const Envelope& message) {
  const auto& p = message.payload;
  const auto& at = message.dst;
  const auto& light = p.light_host;

  std::vector<std::pair<std::string, Placement*>> moves;
  double demand = 0;
  for (auto& [subject, deployed] : world_.plans) {
    for (const auto& stub : deployed.plan.placements) {
      if (stub.fragment != net::Fragment::UC_stub || stub.host != light) continue;
      for (auto& logic : deployed.plan.placements)
        if (logic.fragment == logic_fragment(stub.side) && logic.side == stub.side && logic.host != at) {
          moves.emplace_back(subject, &logic);
          demand += world_.params.footprints.of(logic.fragment);
        }
    }
  }
  if (demand > world_.topology.host(at).free_memory()) {
    Error e(ErrorCode::CapacityExceeded, "migrated control units do not fit on '" + at + "'");
    ack(message, at, std::nullopt, &e);
    return;
  }
  for (auto& [subject, placement] : moves) {
    placement->host = at;
    if (world_.components.has_pe(subject)) world_.components.pe(subject).uc.logic_on = at;
    if (world_.components.has_conduit(subject)) {
      auto& c = world_.components.conduit(subject);
      if (c.uc.split && c.uc.stub_on == light) c.uc.logic_on = at;
    }
  }
  for (const auto& s : p.snapshots) world_.uc_snapshots[World::snapshot_key(s.subject, s.side)] = s;
  world_.correspondents[light] = at;
  world_.recompute_memory();
  core::StateReport report;
  report.source = light;
  ack(message, at, std::move(report));
}

void Platform::on_notice(const Envelope& message) {
  auto kind = message.payload.kind == MessageKind::ROUTE_ALERT ? Trigger::alert : Trigger::info;
  if (!started_ || exec_) {
    deferred_.push_back({kind, message.sent_tick});
    return;
  }
  if (kind == Trigger::alert)
    decide(Trigger::alert, message.sent_tick, {}, Trigger::alert);
  else
    reconsider_on_info(message.sent_tick);
}

void Platform::on_ack(const Envelope& message) {
  if (!exec_) return;
  auto it = exec_->outstanding.find(message.payload.request);
  if (it == exec_->outstanding.end()) return;
  auto request = std::move(it->second);
  exec_->outstanding.erase(it);
  const auto& p = message.payload;

  if (exec_->migration) {
    if (p.error) {
      world_.record("migration_failed", supervisor(),
                    {{"light", exec_->light}, {"to", exec_->to}, {"cause", std::string(to_string(*p.error))}});
      exec_.reset();
      return;
    }
    complete();
    return;
  }

  bool build = request.kind == MessageKind::CREATE_CONTAINER || request.kind == MessageKind::CREATE_CONDUIT;
  if (p.error && build) {
    fail(std::string(to_string(*p.error)), p.error_text);
    return;
  }
  if (!p.error && build) exec_->created.push_back(request.subject);
  if (exec_->outstanding.empty()) {
    ++exec_->batch;
    run_batches();
  }
}

void Platform::supervise() {
  if (!world_.topology.host(supervisor()).alive) return;
  if (!started_) {
    started_ = true;
    decide(Trigger::initial, world_.tick, {}, Trigger::initial);
    return;
  }
  if (exec_) {
    if (world_.tick >= exec_->deadline && !exec_->outstanding.empty()) {
      if (exec_->migration) {
        world_.record("migration_failed", supervisor(),
                      {{"light", exec_->light}, {"to", exec_->to}, {"cause", std::string("Timeout")}});
        exec_.reset();
      } else {
        fail("Timeout", std::to_string(exec_->outstanding.size()) + " acknowledgements missing");
      }
    }
    return;
  }
  if (!deferred_.empty()) {
    auto notices = std::move(deferred_);
    deferred_.clear();
    std::optional<Tick> alert, info;
    for (const auto& n : notices) {
      auto& slot = n.kind == Trigger::alert ? alert : info;
      if (!slot || n.raised < *slot) slot = n.raised;
    }
    if (alert)
      decide(Trigger::alert, *alert, {}, Trigger::alert);
    else
      reconsider_on_info(*info);
    if (exec_) return;
  }
  if (degraded_) {
    decide(Trigger::retry, world_.tick, {}, Trigger::retry);
    if (exec_) return;
  }
  check_migrations();
}

void Platform::notify(Trigger trigger, const qos::ContextSnapshot& context, const std::set<std::string>& excluded,
                      const std::optional<qos::Selection>& selection) {
  if (observers_.empty()) return;
  Decision d{world_.tick, trigger, context, excluded, std::nullopt};
  if (selection) d.chosen = selection->config->id;
  for (const auto& o : observers_) o(d);
}

void Platform::decide(Trigger trigger, Tick trigger_tick, std::set<std::string> excluded, Trigger origin) {
  auto context = world_.snapshot(supervisor());
  auto selection = qos::select(family_, context, excluded);
  notify(trigger, context, excluded, selection);
  if (!selection) {
    if (!degraded_) {
      degraded_ = true;
      world_.record("degraded", supervisor(),
                    {{"trigger", std::string(to_string(trigger))}, {"excluded", static_cast<std::int64_t>(excluded.size())}});
    }
    return;
  }
  execute(*selection->config, std::move(selection->binding), trigger, trigger_tick, std::move(excluded), origin);
}

void Platform::reconsider_on_info(Tick raised) {
  if (!current_) {
    decide(Trigger::info, raised, {}, Trigger::info);
    return;
  }
  auto context = world_.snapshot(supervisor());
  const auto* config = family_.find(current_->id);
  if (!config || !qos::check_binding(*config, current_->binding, context).empty()) {
    decide(Trigger::info, raised, {}, Trigger::info);
    return;
  }
  auto now = qos::score_with(*config, current_->binding, context);
  auto selection = qos::select(family_, context);
  notify(Trigger::info, context, {}, selection);
  if (selection && qos::strictly_better_ignoring_id(selection->score, now))
    execute(*selection->config, std::move(selection->binding), Trigger::info, raised, {}, Trigger::info);
}

void Platform::execute(const qos::ConfigurationGraph& config, qos::Binding binding, Trigger trigger,
                       Tick trigger_tick, std::set<std::string> excluded, Trigger origin) {
  auto bound = qos::bind(config, binding);
  auto actual = world_.deployed();
  auto script = qos::diff_bound(&actual, bound);

  // Components on dead hosts are not part of the live deployment; clear them out.
  for (const auto& [id, c] : world_.components.conduits()) {
    if (c.state != core::ComponentState::failed) continue;
    const auto& s = world_.components.pe(c.source.pe);
    const auto& t = world_.components.pe(c.target.pe);
    script.destroy_conduits.push_back({{s.cm, s.host}, {t.cm, t.host}, c.transport_policy, c.flows});
  }
  for (const auto& [id, pe] : world_.components.pes())
    if (pe.state == core::ComponentState::failed) script.destroy_containers.push_back({pe.cm, pe.host});

  if (script.empty() && current_ && current_->id == config.id) {
    degraded_ = false;
    return;
  }

  Execution e;
  e.target_id = config.id;
  e.binding = std::move(binding);
  e.bound = std::move(bound);
  e.trigger = trigger;
  e.origin = origin;
  e.trigger_tick = trigger_tick;
  e.started = world_.tick;
  e.excluded = std::move(excluded);
  e.batches.resize(5);
  for (const auto& edge : script.destroy_conduits)
    e.batches[0].push_back({MessageKind::DESTROY_CONDUIT, {}, edge, edge.conduit_id()});
  for (const auto& node : script.destroy_containers)
    e.batches[1].push_back({MessageKind::DESTROY_CONTAINER, node, {}, node.pe_id()});
  for (const auto& node : script.create_containers)
    e.batches[2].push_back({MessageKind::CREATE_CONTAINER, node, {}, node.pe_id()});
  for (const auto& edge : script.create_conduits)
    e.batches[3].push_back({MessageKind::CREATE_CONDUIT, {}, edge, edge.conduit_id()});
  exec_ = std::move(e);
  run_batches();
}

void Platform::run_batches() {
  std::optional<Failure> failure;
  while (exec_->batch < exec_->batches.size()) {
    auto& batch = exec_->batches[exec_->batch];
    if (exec_->batch == 4) {
      batch.clear();
      std::set<std::string> subjects(exec_->created.begin(), exec_->created.end());
      const auto& reg = world_.components;
      for (const auto& n : exec_->bound.nodes)
        if (reg.has_pe(n.pe_id()) && reg.pe(n.pe_id()).state == core::ComponentState::created)
          subjects.insert(n.pe_id());
      for (const auto& edge : exec_->bound.edges)
        if (reg.has_conduit(edge.conduit_id()) && reg.conduit(edge.conduit_id()).state == core::ComponentState::created)
          subjects.insert(edge.conduit_id());
      for (const auto& subject : exec_->created)
        if (subjects.erase(subject)) batch.push_back({MessageKind::COMMAND, {}, {}, subject});
      for (const auto& subject : subjects) batch.push_back({MessageKind::COMMAND, {}, {}, subject});
    }
    exec_->deadline = world_.tick + world_.params.ack_timeout;
    auto requests = batch;
    for (const auto& r : requests) {
      failure = send_request(r);
      if (failure) break;
    }
    if (failure || !exec_->outstanding.empty()) break;
    ++exec_->batch;
  }
  if (failure) {
    fail(failure->first, failure->second);
    return;
  }
  if (exec_->batch >= exec_->batches.size()) complete();
}

HostId Platform::correspondent_for(const HostId& host, const qos::Binding& binding) const {
  auto alive = [&](const HostId& h) { return world_.topology.has_host(h) && world_.topology.host(h).alive; };
  if (auto it = world_.correspondents.find(host); it != world_.correspondents.end())
    if (alive(it->second) && world_.route_exists(host, it->second)) return it->second;
  if (auto it = binding.correspondents.find(host); it != binding.correspondents.end()) return it->second;
  if (auto c = find_correspondent(host, world_.topology.hosts(), world_.routing.table(host))) return *c;
  return {};
}

std::optional<HostId> Platform::uc_host(const std::string& subject) const {
  if (world_.components.has_pe(subject)) {
    const auto& pe = world_.components.pe(subject);
    return pe.uc.split ? pe.uc.logic_on : pe.host;
  }
  if (world_.components.has_conduit(subject)) {
    const auto& c = world_.components.conduit(subject);
    return c.uc.split ? c.uc.logic_on : c.source_host;
  }
  return std::nullopt;
}

void Platform::abandon_pe(const PeId& id) {
  auto& pe = world_.components.pe(id);
  std::set<ConduitId> attached;
  for (const auto& b : pe.in_bound)
    if (b) attached.insert(*b);
  for (const auto& b : pe.out_bound)
    if (b) attached.insert(*b);
  for (const auto& c : attached) {
    world_.remove_conduit(c, "conduit_destroyed");
    world_.record("abandoned", supervisor(), {{"subject", c}});
  }
  world_.remove_pe(id, "container_destroyed");
  world_.record("abandoned", supervisor(), {{"subject", id}});
}

std::optional<Platform::Failure> Platform::send_request(const Request& r) {
  const auto& sup = supervisor();
  auto alive = [&](const HostId& h) { return world_.topology.has_host(h) && world_.topology.host(h).alive; };
  auto reachable = [&](const std::optional<HostId>& h) { return h && alive(*h) && world_.route_exists(sup, *h); };
  auto light = [&](const HostId& h) { return world_.topology.host(h).cls == net::HostClass::light; };

  PlatformMessage m;
  m.kind = r.kind;
  m.reply_to = sup;
  HostId factory;
  switch (r.kind) {
    case MessageKind::DESTROY_CONDUIT: {
      auto id = r.edge.conduit_id();
      if (!world_.components.has_conduit(id)) return std::nullopt;
      auto f = world_.factory_host(world_.components.conduit(id).source_host);
      if (!reachable(f)) {
        world_.remove_conduit(id, "conduit_destroyed");
        world_.record("abandoned", sup, {{"subject", id}});
        return std::nullopt;
      }
      factory = *f;
      m.edge = r.edge;
      break;
    }
    case MessageKind::DESTROY_CONTAINER: {
      auto id = r.node.pe_id();
      if (!world_.components.has_pe(id)) return std::nullopt;
      auto f = world_.factory_host(r.node.host);
      if (!alive(r.node.host) || !reachable(f)) {
        abandon_pe(id);
        return std::nullopt;
      }
      factory = *f;
      m.node = r.node;
      break;
    }
    case MessageKind::CREATE_CONTAINER: {
      factory = r.node.host;
      if (light(r.node.host)) {
        factory = correspondent_for(r.node.host, exec_->binding);
        if (factory.empty()) return Failure{"NoCorrespondent", "light host " + r.node.host};
        m.correspondent = factory;
      }
      m.node = r.node;
      break;
    }
    case MessageKind::CREATE_CONDUIT: {
      const auto& src = r.edge.source.host;
      const auto& dst = r.edge.target.host;
      factory = src;
      if (light(src)) {
        m.correspondent = correspondent_for(src, exec_->binding);
        if (m.correspondent->empty()) return Failure{"NoCorrespondent", "light host " + src};
        factory = *m.correspondent;
      }
      if (light(dst)) {
        m.target_correspondent = correspondent_for(dst, exec_->binding);
        if (m.target_correspondent->empty()) return Failure{"NoCorrespondent", "light host " + dst};
      }
      m.edge = r.edge;
      break;
    }
    case MessageKind::COMMAND: {
      auto h = uc_host(r.subject);
      if (!h) return std::nullopt;
      factory = *h;
      m.command = {r.subject, core::ControlCommand::Kind::start, {}, {}};
      break;
    }
    default: return std::nullopt;
  }

  m.request = next_request();
  auto id = m.request;
  if (!world_.send(sup, factory, std::move(m))) {
    if (r.kind == MessageKind::CREATE_CONTAINER || r.kind == MessageKind::CREATE_CONDUIT)
      return Failure{"RouteUnavailable", "factory host " + factory + " is unreachable"};
    if (r.kind == MessageKind::DESTROY_CONDUIT) {
      world_.remove_conduit(r.edge.conduit_id(), "conduit_destroyed");
      world_.record("abandoned", sup, {{"subject", r.edge.conduit_id()}});
    } else if (r.kind == MessageKind::DESTROY_CONTAINER) {
      abandon_pe(r.node.pe_id());
    }
    return std::nullopt;
  }
  exec_->outstanding[id] = r;
  return std::nullopt;
}

void Platform::fail(const std::string& cause, const std::string& detail) {
  auto e = std::move(*exec_);
  exec_.reset();
  world_.record("reconfiguration_failed", supervisor(),
                {{"config", e.target_id},
                 {"cause", cause},
                 {"detail", detail},
                 {"trigger", std::string(to_string(e.trigger))},
                 {"trigger_tick", static_cast<std::int64_t>(e.trigger_tick)}});
  e.excluded.insert(e.target_id);
  decide(Trigger::fallback, e.trigger_tick, std::move(e.excluded), e.origin);
}

void Platform::complete() {
  auto e = std::move(*exec_);
  exec_.reset();
  if (e.migration) {
    bool released = world_.topology.has_host(e.from) && world_.topology.host(e.from).alive;
    world_.record("migration_complete", supervisor(),
                  {{"light", e.light},
                   {"from", e.from},
                   {"to", e.to},
                   {"fragments", static_cast<std::int64_t>(e.fragments)},
                   {"old_fragments", std::string(released ? "released" : "abandoned")}});
    unsupervised_.erase(e.light);
    refresh_in_use();
    return;
  }
  if (e.origin != Trigger::initial) ++reconfigurations_;
  Details d{{"config", e.target_id},
            {"trigger", std::string(to_string(e.trigger))},
            {"origin", std::string(to_string(e.origin))},
            {"trigger_tick", static_cast<std::int64_t>(e.trigger_tick)},
            {"started", static_cast<std::int64_t>(e.started)},
            {"bindings", describe(e.binding)},
            {"destroyed_conduits", static_cast<std::int64_t>(e.batches[0].size())},
            {"destroyed_containers", static_cast<std::int64_t>(e.batches[1].size())},
            {"created_containers", static_cast<std::int64_t>(e.batches[2].size())},
            {"created_conduits", static_cast<std::int64_t>(e.batches[3].size())}};
  current_ = CurrentConfiguration{e.target_id, std::move(e.binding), std::move(e.bound)};
  degraded_ = false;
  world_.record("reconfiguration_complete", supervisor(), std::move(d));
  refresh_in_use();
}

void Platform::check_migrations() {
  std::map<HostId, std::set<HostId>> logic_hosts;
  for (const auto& uc : split_ucs(world_)) logic_hosts[uc.stub].insert(uc.logic);

  for (const auto& [light, hosts] : logic_hosts) {
    if (!world_.topology.host(light).alive) continue;
    const auto& table = world_.routing.table(light);
    auto best = find_correspondent(light, world_.topology.hosts(), table);
    bool needed = false;
    for (const auto& h : hosts) {
      auto entry = table.lookup(h);
      if (!world_.topology.host(h).alive || !entry) {
        needed = true;
      } else if (best && *best != h) {
        auto b = table.lookup(*best);
        if (b && b->hop_count < entry->hop_count) needed = true;
      }
    }
    if (!needed) continue;
    if (!best) {
      if (unsupervised_.insert(light).second) world_.record("unsupervised", light, {{"light", light}});
      continue;
    }

    Execution e;
    e.migration = true;
    e.light = light;
    auto current = world_.correspondents.find(light);
    e.from = current != world_.correspondents.end() ? current->second : *hosts.begin();
    e.to = *best;
    e.trigger_tick = world_.tick;
    e.started = world_.tick;
    e.deadline = world_.tick + world_.params.ack_timeout;

    PlatformMessage m;
    m.kind = MessageKind::MIGRATE_UC;
    m.reply_to = supervisor();
    m.light_host = light;
    m.old_correspondent = e.from;
    for (const auto& uc : split_ucs(world_)) {
      if (uc.stub != light) continue;
      UcSnapshot s;
      if (auto it = world_.uc_snapshots.find(World::snapshot_key(uc.subject, uc.side)); it != world_.uc_snapshots.end())
        s = it->second;
      else if (auto report = probe_subject(world_, uc.subject))
        s.report = *report;
      s.subject = uc.subject;
      s.side = uc.side;
      m.snapshots.push_back(std::move(s));
    }
    e.fragments = m.snapshots.size();
    m.request = next_request();
    auto id = m.request;
    exec_ = std::move(e);
    if (!world_.send(supervisor(), *best, std::move(m))) {
      world_.record("migration_failed", supervisor(),
                    {{"light", light}, {"to", *best}, {"cause", std::string("RouteUnavailable")}});
      exec_.reset();
      continue;
    }
    exec_->outstanding[id] = Request{MessageKind::MIGRATE_UC, {}, {}, light};
    return;
  }
}

void Platform::send_state_reports() {
  auto period = std::max(1, world_.params.uc_report_period);
  if (world_.tick == 0 || world_.tick % period != 0) return;
  for (const auto& uc : split_ucs(world_)) {
    if (!world_.topology.host(uc.stub).alive) continue;
    auto report = probe_subject(world_, uc.subject);
    if (!report) continue;
    PlatformMessage m;
    m.kind = MessageKind::STATE_REPORT;
    m.report = *report;
    m.snapshots.push_back({uc.subject, uc.side, *report, {}});
    world_.send(uc.stub, uc.logic, std::move(m));
  }
}

void Platform::refresh_in_use() {
  std::map<HostId, std::set<HostId>> use;
  auto link = [&](const HostId& a, const HostId& b) {
    if (a == b) return;
    use[a].insert(b);
    use[b].insert(a);
  };
  for (const auto& [id, c] : world_.components.conduits())
    if (c.state != core::ComponentState::failed) link(c.source_host, c.target_host);
  for (const auto& uc : split_ucs(world_)) link(uc.stub, uc.logic);
  for (const auto& [id, pe] : world_.components.pes())
    if (pe.state != core::ComponentState::failed) link(supervisor(), pe.uc.split ? pe.uc.logic_on : pe.host);
  for (const auto& [id, host] : world_.topology.hosts()) world_.routing.set_in_use(id, use[id]);
}

}  // namespace hetadapt::platform
