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

#include "hetadapt/sim/simulation.hpp"

#include <algorithm>

#include "hetadapt/common/error.hpp"

namespace hetadapt::sim {

net::Topology build_topology(const ScenarioSpec& spec) {
  net::Topology t;
  for (const auto& h : spec.hosts) t.add_host(h);
  for (const auto& [a, b] : spec.links) t.add_wired_link(a, b);
  t.recompute();
  return t;
}

Simulation::Simulation(const ScenarioSpec& spec, std::optional<std::uint64_t> seed, std::ostream* log_sink)
    : events_(spec.events) {
  auto params = spec.params;
  if (seed) params.seed = *seed;
  world_ = std::make_unique<platform::World>(params, build_topology(spec), spec.repository);
  world_->log.set_sink(log_sink);
  platform_ = std::make_unique<platform::Platform>(*world_, spec.family());
  std::stable_sort(events_.begin(), events_.end(),
                   [](const ScenarioEvent& a, const ScenarioEvent& b) { return a.tick < b.tick; });
}

void Simulation::advance_tick() {
  auto& w = *world_;
  w.record("tick_marker", "");
  w.deliver_messages();
  platform_->routing_phase();
  platform_->platform_phase();
  w.step_components();
  apply_events();
  w.reconcile_energy();
  w.log.flush();
  auto done = w.tick;
  ++w.tick;
  for (const auto& observer : observers_) observer(done);
}

void Simulation::run(Tick max_ticks) {
  while (world_->tick < max_ticks) advance_tick();
}

void Simulation::apply_events() {
  while (next_event_ < events_.size() && events_[next_event_].tick <= world_->tick) {
    const auto& ev = events_[next_event_++];
    if (ev.tick < world_->tick) continue;
    apply(ev.action);
  }
}

void Simulation::apply(const EventAction& action) {
  auto& w = *world_;
  Details d{{"kind", std::string(event_kind(action))}};
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, event::FailLink>) {
          d["a"] = a.a;
          d["b"] = a.b;
          w.record("scenario_event", "", d);
          w.topology.apply(net::topology_event::FailLink{a.a, a.b});
        } else if constexpr (std::is_same_v<T, event::FailHost>) {
          d["host"] = a.host;
          w.record("scenario_event", a.host, d);
          w.kill_host(a.host, "failure");
        } else if constexpr (std::is_same_v<T, event::Restore>) {
          if (a.b) {
            d["a"] = a.a;
            d["b"] = *a.b;
            w.record("scenario_event", "", d);
            w.topology.apply(net::topology_event::Restore{a.a, a.b});
          } else {
            d["host"] = a.a;
            w.record("scenario_event", a.a, d);
            w.restore_host(a.a);
          }
        } else if constexpr (std::is_same_v<T, event::MoveHost>) {
          d["host"] = a.host;
          d["x"] = a.x;
          d["y"] = a.y;
          w.record("scenario_event", a.host, d);
          w.topology.apply(net::topology_event::MoveHost{a.host, {a.x, a.y}});
        } else if constexpr (std::is_same_v<T, event::DrainBattery>) {
          d["host"] = a.host;
          d["amount"] = a.amount;
          w.record("scenario_event", a.host, d);
          net::charge_energy(w.topology.host(a.host), net::EnergyKind::drained, a.amount);
        } else if constexpr (std::is_same_v<T, event::InjectFrame>) {
          d["cm"] = a.cm;
          d["host"] = a.host;
          d["flow"] = a.flow;
          d["count"] = static_cast<std::int64_t>(a.count);
          w.record("scenario_event", a.host, d);
          inject(a);
        } else {
          d["key"] = a.key;
          d["value"] = a.value;
          if (a.host) d["host"] = *a.host;
          w.record("scenario_event", a.host.value_or(""), d);
          set_param(a);
        }
      },
      action);
}

void Simulation::inject(const event::InjectFrame& inject) {
  auto& w = *world_;
  const auto pe_id = inject.cm + "@" + inject.host;
  core::ElementaryProcessor* pe = nullptr;
  std::optional<std::size_t> port;
  if (w.components.has_pe(pe_id)) {
    pe = &w.components.pe(pe_id);
    auto it = std::find(pe->out_ports.begin(), pe->out_ports.end(), inject.flow);
    if (it != pe->out_ports.end()) port = static_cast<std::size_t>(it - pe->out_ports.begin());
  }
  for (int i = 0; i < inject.count; ++i) {
    core::DataFrame frame;
    frame.flow_id = inject.flow;
    frame.payload_size = inject.bytes;
    frame.produced_tick = w.tick;
    frame.producer = pe_id;
    ++w.frames.emitted;
    if (!pe || !port || pe->state == core::ComponentState::failed) {
      w.drop_frame(frame, "unconnected", pe_id);
      continue;
    }
    frame.seq = pe->next_seq[inject.flow]++;
    frame.payload_digest = mix64(pe->digest_salt, mix64(fnv1a(inject.flow), frame.seq));
    pe->output_unit[*port].push_back(std::move(frame));
  }
}

void Simulation::set_param(const event::SetParam& param) {
  auto& w = *world_;
  auto& p = w.params;
  const auto& key = param.key;
  const double v = param.value;
  if (param.host) {
    auto& host = w.topology.host(*param.host);
    if (key == "memory_capacity") {
      host.memory_capacity = v;
    } else if (key == "radio_range") {
      host.radio_range = v;
      w.topology.recompute();
    }
    return;
  }
  if (key == "alpha") p.energy.alpha = v;
  else if (key == "beta") p.energy.beta = v;
  else if (key == "gamma") p.energy.gamma = v;
  else if (key == "control_bytes") p.control_bytes = v;
  else if (key == "hello_miss") {
    p.hello_miss = std::max(1, static_cast<int>(v));
    w.routing.set_hello_miss(p.hello_miss);
  } else if (key == "mailbox_capacity") {
    p.mailbox_capacity = std::max<std::size_t>(1, static_cast<std::size_t>(v));
    for (auto& [id, pe] : w.components.pes()) pe.mailbox_capacity = p.mailbox_capacity;
  } else if (key == "uc_report_period") {
    p.uc_report_period = std::max(1, static_cast<int>(v));
  } else if (key == "ack_timeout") {
    p.ack_timeout = std::max(1, static_cast<int>(v));
  }
}

Summary Simulation::summary() const {
  const auto& w = *world_;
  Summary s;
  if (const auto& current = platform_->current()) s.final_config = current->id;
  s.reconfigurations = platform_->reconfigurations();
  for (const auto& [id, host] : w.topology.hosts()) s.energy[id] = host.energy;
  s.emitted = w.frames.emitted;
  s.delivered = w.frames.delivered;
  s.dropped = w.frames.dropped;
  s.buffered = w.buffered_frames();
  s.degraded = platform_->degraded();
  s.ticks = w.tick;
  return s;
}

}  // namespace hetadapt::sim
