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

#include "support.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <set>
#include <sstream>

#include "hetadapt/common/error.hpp"
#include "hetadapt/sim/simulation.hpp"

namespace testsupport {

using namespace hetadapt;
namespace ev = sim::event;

namespace {

const std::vector<std::string> kCapabilities = {"infrared", "camera", "thermal"};

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v.at(static_cast<std::size_t>(integer(0, static_cast<int>(v.size()) - 1)));
  }

 private:
  std::mt19937_64 rng_;
};

core::BusinessComponentDescriptor cm(std::string id, std::vector<FlowId> in, std::vector<FlowId> out, int memory,
                                     int cpu) {
  core::BusinessComponentDescriptor d;
  d.id = std::move(id);
  d.input_flows = std::move(in);
  d.output_flows = std::move(out);
  d.memory_footprint = memory;
  d.cpu_cost = cpu;
  return d;
}

sim::ScenarioSpec generate(Draw& draw, const GeneratorOptions& o) {
  sim::ScenarioSpec spec;
  spec.params.seed = static_cast<std::uint64_t>(draw.integer(0, 1000));
  spec.params.hello_miss = draw.integer(1, 3);
  spec.params.uc_report_period = draw.integer(3, 12);

  std::vector<HostId> fixed, light, sensors;
  const int nf = draw.integer(1, o.max_fixed);
  for (int i = 1; i <= nf; ++i) {
    net::Host h;
    h.id = "F" + std::to_string(i);
    h.cls = net::HostClass::fixed;
    h.position = {draw.real(0, 150), draw.real(0, 150)};
    h.radio_range = draw.chance(0.8) ? draw.real(40, 80) : 0.0;
    fixed.push_back(h.id);
    spec.hosts.push_back(h);
    if (i > 1) spec.links.emplace_back(fixed[i - 2], h.id);
  }
  const int nl = draw.integer(0, o.max_light);
  for (int i = 1; i <= nl; ++i) {
    net::Host h;
    h.id = "L" + std::to_string(i);
    h.cls = net::HostClass::light;
    h.position = {draw.real(0, 150), draw.real(0, 150)};
    h.radio_range = draw.real(50, 90);
    h.memory_capacity = draw.integer(12, 40);
    h.battery_initial = draw.chance(0.2) ? draw.real(2000, 8000) : 1e6;
    if (o.static_world) h.battery_initial = 1e9;
    light.push_back(h.id);
    spec.hosts.push_back(h);
  }
  const int ns = draw.integer(0, o.max_sensor);
  for (int i = 1; i <= ns; ++i) {
    net::Host h;
    h.id = "S" + std::to_string(i);
    h.cls = net::HostClass::sensor;
    h.position = {draw.real(0, 150), draw.real(0, 150)};
    h.radio_range = draw.real(50, 90);
    h.memory_capacity = draw.integer(10, 32);
    h.battery_initial = draw.chance(0.2) ? draw.real(1500, 6000) : 1e6;
    if (o.static_world) h.battery_initial = 1e9;
    const auto& cap = draw.pick(kCapabilities);
    h.capabilities.insert(cap);
    h.preloaded_repository.insert("sense-" + cap);
    if (draw.chance(0.4)) h.preloaded_repository.insert("filter");
    sensors.push_back(h.id);
    spec.hosts.push_back(h);
  }

  for (const auto& cap : kCapabilities) {
    auto d = cm("sense-" + cap, {}, {"data"}, draw.integer(1, 3), draw.integer(0, 3));
    d.category = core::Category::sensing;
    d.capability = cap;
    d.period = draw.integer(1, 5);
    d.frame_bytes = draw.integer(8, 64);
    spec.repository.add(d);
  }
  auto ticker = cm("ticker", {}, {"data"}, 2, 1);
  ticker.period = draw.integer(1, 4);
  spec.repository.add(ticker);
  auto filter = cm("filter", {"data"}, {"data"}, draw.integer(1, 4), draw.integer(0, 2));
  filter.transform = {core::Transform::Kind::downsample, draw.integer(1, 3)};
  spec.repository.add(filter);
  auto threshold = cm("threshold", {"data"}, {"data"}, 2, 1);
  threshold.transform = {core::Transform::Kind::threshold, draw.integer(20, 90)};
  threshold.interaction_style = core::InteractionStyle::method_call;
  spec.repository.add(threshold);
  auto sink = cm("sink", {"data"}, {}, draw.integer(2, 6), 1);
  sink.interaction_style = draw.chance(0.3) ? core::InteractionStyle::mailbox : core::InteractionStyle::event;
  spec.repository.add(sink);

  qos::ConfigurationFamily family;
  family.application = "app";
  family.supervisor = fixed.front();
  std::vector<HostId> all;
  for (const auto& h : spec.hosts) all.push_back(h.id);
  const int nc = draw.integer(1, o.max_configs);
  for (int c = 0; c < nc; ++c) {
    qos::ConfigurationGraph g;
    g.id = "c" + std::to_string(c);
    g.qos_level = draw.integer(0, 3);
    qos::ConfigNode src;
    src.id = "src";
    const int kind = draw.integer(0, 2);
    if (kind == 0 || sensors.empty()) {
      src.cm = "ticker";
      if (draw.chance(0.5) || light.empty()) src.binding.host = draw.pick(fixed);
      else src.binding.cls = net::HostClass::light;
    } else {
      const auto& cap = draw.pick(kCapabilities);
      src.cm = "sense-" + cap;
      if (kind == 1) {
        src.binding.cls = net::HostClass::sensor;
        src.binding.capability = cap;
      } else {
        src.binding.host = draw.pick(sensors);
      }
    }
    g.nodes.push_back(src);
    std::string prev = "src";
    const int filters = draw.integer(0, 2);
    for (int f = 0; f < filters; ++f) {
      qos::ConfigNode n;
      n.id = "f" + std::to_string(f);
      n.cm = draw.chance(0.5) ? "filter" : "threshold";
      switch (draw.integer(0, 3)) {
        case 0: n.binding.host = draw.pick(all); break;
        case 1: n.binding.cls = net::HostClass::fixed; break;
        case 2: n.binding.cls = net::HostClass::light; break;
        default: n.binding.cls = net::HostClass::sensor; break;
      }
      g.nodes.push_back(n);
      qos::ConfigEdge e{prev, n.id, {}, {}};
      if (draw.chance(0.25)) e.constraints.insert(qos::EdgeConstraint::realtime);
      g.edges.push_back(e);
      prev = n.id;
    }
    qos::ConfigNode s;
    s.id = "sink";
    s.cm = "sink";
    s.binding.host = draw.chance(0.7) ? family.supervisor : draw.pick(all);
    g.nodes.push_back(s);
    qos::ConfigEdge e{prev, "sink", {}, {}};
    if (draw.chance(0.2)) e.constraints.insert(qos::EdgeConstraint::synchronized);
    g.edges.push_back(e);
    family.configurations.push_back(g);
  }
  spec.families.push_back(family);
  spec.application = family.application;

  if (!o.static_world) {
    std::vector<HostId> mobile = light;
    mobile.insert(mobile.end(), sensors.begin(), sensors.end());
    std::vector<HostId> victims(all.begin() + 1, all.end());
    for (int i = 0; i < o.events; ++i) {
      sim::ScenarioEvent event;
      event.tick = draw.integer(5, static_cast<int>(o.horizon) - 10);
      switch (draw.integer(0, 6)) {
        case 0:
          if (!spec.links.empty()) {
            const auto& [a, b] = draw.pick(spec.links);
            event.action = ev::FailLink{a, b};
          } else {
            event.action = ev::FailLink{draw.pick(all), draw.pick(all)};
          }
          break;
        case 1:
          if (victims.empty()) continue;
          event.action = ev::FailHost{draw.pick(victims)};
          break;
        case 2:
          event.action = ev::Restore{draw.pick(all), std::nullopt};
          break;
        case 3:
          if (mobile.empty()) continue;
          event.action = ev::MoveHost{draw.pick(mobile), draw.real(0, 150), draw.real(0, 150)};
          break;
        case 4:
          if (mobile.empty()) continue;
          event.action = ev::DrainBattery{draw.pick(mobile), draw.real(100, 3000)};
          break;
        case 5:
          event.action = ev::InjectFrame{"ticker", draw.pick(all), "data", draw.integer(1, 4), 32};
          break;
        default:
          event.action = ev::SetParam{"memory_capacity", static_cast<double>(draw.integer(4, 40)), draw.pick(all)};
          break;
      }
      if (std::holds_alternative<ev::FailLink>(event.action) &&
          std::get<ev::FailLink>(event.action).a == std::get<ev::FailLink>(event.action).b)
        continue;
      spec.events.push_back(event);
    }
  }
  sim::validate(spec);
  return spec;
}

}  // namespace

sim::ScenarioSpec random_scenario(std::uint64_t seed, const GeneratorOptions& options) {
  Draw draw(seed);
  return generate(draw, options);
}

std::map<HostId, int> bfs_hops(const net::Topology& topology, const HostId& from) {
  std::map<HostId, int> dist;
  if (!topology.host(from).alive) return dist;
  dist[from] = 0;
  std::deque<HostId> queue{from};
  while (!queue.empty()) {
    auto cur = queue.front();
    queue.pop_front();
    for (const auto& [pair, link] : topology.links()) {
      if (link.state != net::LinkState::up) continue;
      HostId next;
      if (pair.first == cur) next = pair.second;
      else if (pair.second == cur) next = pair.first;
      else continue;
      if (!topology.host(next).alive || dist.contains(next)) continue;
      dist[next] = dist[cur] + 1;
      queue.push_back(next);
    }
  }
  return dist;
}

int diameter(const net::Topology& topology) {
  int d = 0;
  for (const auto& [id, host] : topology.hosts())
    for (const auto& [other, hops] : bfs_hops(topology, id)) d = std::max(d, hops);
  return d;
}

std::vector<std::string> placement_violations(const platform::World& world) {
  using net::Fragment;
  using platform::Side;
  std::vector<std::string> out;
  const auto& topo = world.topology;
  auto cls_of = [&](const HostId& h) { return topo.host(h).cls; };
  auto is_fixed = [&](const HostId& h) { return topo.has_host(h) && topo.host(h).is_fixed(); };

  using Triple = std::tuple<Fragment, Side, HostId>;
  auto compare = [&](const std::string& subject, std::multiset<Triple> expected, const platform::DeploymentPlan& plan,
                     const std::vector<std::pair<Fragment, Side>>& deported) {
    std::multiset<Triple> actual;
    for (const auto& p : plan.placements) {
      bool remote = std::find(deported.begin(), deported.end(), std::make_pair(p.fragment, p.side)) != deported.end();
      if (remote) {
        if (!is_fixed(p.host))
          out.push_back(subject + ": " + std::string(net::to_string(p.fragment)) + " on non-fixed host " + p.host);
        continue;
      }
      actual.insert({p.fragment, p.side, p.host});
    }
    if (actual != expected) out.push_back(subject + ": local fragments differ from the class rules");
    std::size_t remote_count = plan.placements.size() - actual.size();
    if (remote_count != deported.size()) out.push_back(subject + ": wrong number of deported fragments");
  };

  for (const auto& [id, pe] : world.components.pes()) {
    auto it = world.plans.find(id);
    if (it == world.plans.end()) {
      out.push_back(id + ": deployed without a plan");
      continue;
    }
    std::multiset<Triple> expected{{Fragment::CM, Side::none, pe.host},
                                   {Fragment::UE, Side::none, pe.host},
                                   {Fragment::US, Side::none, pe.host}};
    std::vector<std::pair<Fragment, Side>> deported;
    if (cls_of(pe.host) == net::HostClass::light) {
      expected.insert({Fragment::UC_stub, Side::none, pe.host});
      deported.emplace_back(Fragment::UC_logic, Side::none);
    } else {
      expected.insert({Fragment::UC_full, Side::none, pe.host});
    }
    compare(id, expected, it->second.plan, deported);
  }
  for (const auto& [id, c] : world.components.conduits()) {
    auto it = world.plans.find(id);
    if (it == world.plans.end()) {
      out.push_back(id + ": deployed without a plan");
      continue;
    }
    std::multiset<Triple> expected;
    std::vector<std::pair<Fragment, Side>> deported;
    for (auto [side, host] : {std::pair{Side::in, c.source_host}, std::pair{Side::out, c.target_host}}) {
      expected.insert({side == Side::in ? Fragment::ENDPOINT_IN : Fragment::ENDPOINT_OUT, side, host});
      if (cls_of(host) == net::HostClass::light) {
        expected.insert({Fragment::UC_stub, side, host});
        deported.emplace_back(Fragment::CONDUIT_UC, side);
      } else {
        expected.insert({Fragment::CONDUIT_UC, side, host});
      }
    }
    compare(id, expected, it->second.plan, deported);
  }
  return out;
}

namespace {

struct Oracle {
  const qos::ConfigurationGraph& config;
  const qos::ContextSnapshot& ctx;

  bool alive(const HostId& h) const {
    auto it = ctx.hosts.find(h);
    return it != ctx.hosts.end() && it->second.alive;
  }

  std::optional<int> hops(const HostId& a, const HostId& b) const {
    if (!alive(a) || !alive(b)) return std::nullopt;
    if (a == b) return 0;
    auto t = ctx.tables.find(a);
    if (t == ctx.tables.end()) return std::nullopt;
    auto e = t->second.entries.find(b);
    if (e == t->second.entries.end()) return std::nullopt;
    return e->second.hop_count;
  }

  std::optional<HostId> nearest_fixed(const HostId& light) const {
    std::optional<HostId> best;
    int best_hops = 0;
    for (const auto& [id, h] : ctx.hosts) {
      if (h.cls != net::HostClass::fixed) continue;
      auto d = hops(light, id);
      if (!d) continue;
      if (!best || *d < best_hops) {
        best = id;
        best_hops = *d;
      }
    }
    return best;
  }

  bool node_ok(const qos::ConfigNode& n, const HostId& h) const {
    const auto& host = ctx.hosts.at(h);
    if (!host.alive || !hops(ctx.supervisor, h)) return false;
    const auto* d = ctx.repository.find(n.cm);
    if (!d) return false;
    if (n.binding.host && *n.binding.host != h) return false;
    if (n.binding.cls && *n.binding.cls != host.cls) return false;
    if (n.binding.capability && !host.capabilities.contains(*n.binding.capability)) return false;
    if (d->category == core::Category::sensing && !host.capabilities.contains(d->capability)) return false;
    if (host.cls == net::HostClass::sensor && !host.preloaded_repository.contains(n.cm)) return false;
    if (host.cls == net::HostClass::light && !nearest_fixed(h)) return false;
    return true;
  }

  bool assignment_ok(const std::vector<HostId>& hosts) const {
    const auto& f = ctx.params.footprints;
    std::map<HostId, double> memory;
    std::set<std::pair<std::string, HostId>> used;
    std::map<std::string, HostId> where;
    for (std::size_t i = 0; i < config.nodes.size(); ++i) {
      const auto& n = config.nodes[i];
      const auto& h = hosts[i];
      if (!used.insert({n.cm, h}).second) return false;
      where[n.id] = h;
      memory[h] += ctx.repository.at(n.cm).memory_footprint + f.ue + f.us;
      if (ctx.hosts.at(h).cls == net::HostClass::light) {
        memory[h] += f.uc_stub;
        memory[*nearest_fixed(h)] += f.uc_logic;
      } else {
        memory[h] += f.uc_full;
      }
    }
    for (const auto& e : config.edges) {
      const auto& a = where.at(e.source);
      const auto& b = where.at(e.target);
      if (!hops(a, b) || !hops(b, a)) return false;
      for (const auto& end : {a, b}) {
        memory[end] += f.endpoint;
        if (ctx.hosts.at(end).cls == net::HostClass::light) {
          memory[end] += f.uc_stub;
          memory[*nearest_fixed(end)] += f.conduit_uc;
        } else {
          memory[end] += f.conduit_uc;
        }
      }
    }
    for (const auto& [h, m] : memory)
      if (m > ctx.hosts.at(h).free_memory()) return false;
    return true;
  }

  bool any() const {
    if (!alive(ctx.supervisor)) return false;
    std::vector<std::vector<HostId>> options;
    for (const auto& n : config.nodes) {
      std::vector<HostId> hs;
      for (const auto& [id, h] : ctx.hosts)
        if (node_ok(n, id)) hs.push_back(id);
      if (hs.empty()) return false;
      options.push_back(std::move(hs));
    }
    std::vector<std::size_t> index(options.size(), 0);
    std::vector<HostId> pick(options.size());
    while (true) {
      for (std::size_t i = 0; i < options.size(); ++i) pick[i] = options[i][index[i]];
      if (assignment_ok(pick)) return true;
      std::size_t i = 0;
      while (i < index.size() && ++index[i] == options[i].size()) index[i++] = 0;
      if (i == index.size()) return false;
    }
  }
};

}  // namespace

bool exhaustive_valid(const qos::ConfigurationGraph& config, const qos::ContextSnapshot& context) {
  return Oracle{config, context}.any();
}

std::string run_log(const sim::ScenarioSpec& spec, Tick ticks, std::optional<std::uint64_t> seed) {
  std::ostringstream out;
  sim::Simulation simulation(spec, seed, &out);
  simulation.world().log.set_retain(false);
  simulation.run(ticks);
  return out.str();
}

qos::ContextSnapshot initial_context(const sim::ScenarioSpec& spec) {
  platform::World world(spec.params, sim::build_topology(spec), spec.repository);
  return world.snapshot(spec.family().supervisor);
}

}  // namespace testsupport
