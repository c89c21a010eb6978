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

#include "hetadapt/qos/config.hpp"

#include <algorithm>
#include <functional>

#include "hetadapt/common/error.hpp"
#include "hetadapt/platform/deployment.hpp"

namespace hetadapt::qos {

std::string_view to_string(EdgeConstraint c) {
  return c == EdgeConstraint::synchronized ? "synchronized" : "realtime";
}

EdgeConstraint edge_constraint_from_string(std::string_view text) {
  if (text == "synchronized") return EdgeConstraint::synchronized;
  if (text == "realtime") return EdgeConstraint::realtime;
  throw Error(ErrorCode::InvalidValue, "unknown conduit constraint '" + std::string(text) + "'");
}

core::TransportPolicy policy_for(const std::set<EdgeConstraint>& constraints) {
  bool sync = constraints.contains(EdgeConstraint::synchronized);
  bool rt = constraints.contains(EdgeConstraint::realtime);
  if (sync && rt) throw Error(ErrorCode::InvalidValue, "constraints {synchronized, realtime} map to no policy");
  if (sync) return core::TransportPolicy::synchronized;
  if (rt) return core::TransportPolicy::realtime_drop;
  return core::TransportPolicy::fifo;
}

const ConfigNode* ConfigurationGraph::node(std::string_view id) const {
  for (const auto& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

const ConfigurationGraph* ConfigurationFamily::find(std::string_view id) const {
  for (const auto& c : configurations)
    if (c.id == id) return &c;
  return nullptr;
}

namespace {

[[noreturn]] void invalid(const ConfigurationGraph& config, const std::string& what) {
  throw Error(ErrorCode::InvalidValue, "configuration '" + config.id + "': " + what);
}

std::size_t count_of(const std::vector<FlowId>& v, const FlowId& f) {
  return static_cast<std::size_t>(std::count(v.begin(), v.end(), f));
}

}  // namespace

void normalize(ConfigurationGraph& config, const core::Repository& repository) {
  if (config.id.empty()) throw Error(ErrorCode::InvalidValue, "configuration without id");
  if (config.qos_level < 0) invalid(config, "negative qos_level");
  if (config.nodes.empty()) invalid(config, "no nodes");

  std::map<std::string, const core::BusinessComponentDescriptor*> desc;
  for (const auto& n : config.nodes) {
    if (n.id.empty()) invalid(config, "node without id");
    if (desc.contains(n.id)) invalid(config, "duplicate node '" + n.id + "'");
    const auto* d = repository.find(n.cm);
    if (!d) throw Error(ErrorCode::DanglingReference, "node '" + n.id + "' references unknown cm '" + n.cm + "'");
    const auto& b = n.binding;
    if (b.host && (b.cls || b.capability)) invalid(config, "node '" + n.id + "' has both a host and a constraint");
    if (!b.host && !b.cls && !b.capability) invalid(config, "node '" + n.id + "' has no host binding");
    desc[n.id] = d;
  }

  std::map<std::string, std::map<FlowId, std::size_t>> in_use, out_use;
  std::map<std::string, std::set<std::string>> adjacency;
  for (auto& e : config.edges) {
    if (!desc.contains(e.source)) throw Error(ErrorCode::DanglingReference, "edge source '" + e.source + "'");
    if (!desc.contains(e.target)) throw Error(ErrorCode::DanglingReference, "edge target '" + e.target + "'");
    if (e.source == e.target) invalid(config, "self edge on '" + e.source + "'");
    policy_for(e.constraints);
    const auto& src = *desc[e.source];
    const auto& dst = *desc[e.target];
    if (e.flows.empty()) {
      for (const auto& f : src.output_flows)
        if (count_of(dst.input_flows, f) > 0 && count_of(e.flows, f) == 0) e.flows.push_back(f);
      if (e.flows.empty()) invalid(config, "no common flow on edge " + e.source + "->" + e.target);
    }
    for (const auto& f : e.flows) {
      if (count_of(src.output_flows, f) == 0 || count_of(dst.input_flows, f) == 0)
        invalid(config, "flow '" + f + "' incompatible on edge " + e.source + "->" + e.target);
      if (++out_use[e.source][f] > count_of(src.output_flows, f))
        invalid(config, "too many edges leaving '" + e.source + "' with flow '" + f + "'");
      if (++in_use[e.target][f] > count_of(dst.input_flows, f))
        invalid(config, "too many edges entering '" + e.target + "' with flow '" + f + "'");
    }
    adjacency[e.source].insert(e.target);
    adjacency[e.target].insert(e.source);
  }

  std::set<std::string> seen{config.nodes.front().id};
  std::vector<std::string> stack{config.nodes.front().id};
  while (!stack.empty()) {
    auto cur = stack.back();
    stack.pop_back();
    for (const auto& next : adjacency[cur])
      if (seen.insert(next).second) stack.push_back(next);
  }
  if (seen.size() != config.nodes.size()) invalid(config, "graph is not connected");
}

void normalize(ConfigurationFamily& family, const core::Repository& repository) {
  if (family.configurations.empty())
    throw Error(ErrorCode::InvalidValue, "family '" + family.application + "' has no configuration");
  std::set<std::string> ids;
  for (auto& c : family.configurations) {
    normalize(c, repository);
    if (!ids.insert(c.id).second) throw Error(ErrorCode::InvalidValue, "duplicate configuration id '" + c.id + "'");
  }
}

std::optional<int> ContextSnapshot::hops(const HostId& from, const HostId& to) const {
  auto a = hosts.find(from);
  if (a == hosts.end() || !a->second.alive) return std::nullopt;
  if (from == to) return 0;
  auto t = tables.find(from);
  if (t == tables.end()) return std::nullopt;
  auto entry = t->second.lookup(to);
  if (!entry) return std::nullopt;
  return entry->hop_count;
}

std::vector<HostId> ContextSnapshot::path(const HostId& from, const HostId& to) const {
  if (!reachable(from, to)) return {};
  std::vector<HostId> out{from};
  HostId cur = from;
  while (cur != to) {
    auto t = tables.find(cur);
    if (t == tables.end()) return {};
    auto entry = t->second.lookup(to);
    if (!entry || out.size() > hosts.size()) return {};
    cur = entry->next_hop;
    out.push_back(cur);
  }
  return out;
}

std::optional<HostId> ContextSnapshot::correspondent(const HostId& light) const {
  auto t = tables.find(light);
  if (t == tables.end()) return std::nullopt;
  return platform::find_correspondent(light, hosts, t->second);
}

namespace {

platform::HostSlot slot_for(const net::Host& host, const std::map<HostId, HostId>& corr) {
  platform::HostSlot slot{host.id, host.cls, std::nullopt};
  if (auto it = corr.find(host.id); it != corr.end()) slot.correspondent = it->second;
  return slot;
}

class BindingSearch {
 public:
  BindingSearch(const ConfigurationGraph& config, const ContextSnapshot& ctx) : config_(config), ctx_(ctx) {
    for (std::size_t i = 0; i < config.nodes.size(); ++i)
      if (config.nodes[i].binding.host) order_.push_back(i);
    for (std::size_t i = 0; i < config.nodes.size(); ++i)
      if (!config.nodes[i].binding.host) order_.push_back(i);
  }

  /// Why `host_id` cannot take `node` regardless of the other bindings.
  std::optional<std::string> static_problem(const ConfigNode& node, const HostId& host_id) const {
    auto it = ctx_.hosts.find(host_id);
    if (it == ctx_.hosts.end()) return "host " + host_id + " is unknown";
    const auto& host = it->second;
    if (!host.alive) return "host " + host_id + " is down";
    if (!ctx_.reachable(ctx_.supervisor, host_id)) return "host " + host_id + " is unreachable from the supervisor";
    const auto* desc = ctx_.repository.find(node.cm);
    if (!desc) return "cm " + node.cm + " is not in the repository";
    if (node.binding.cls && host.cls != *node.binding.cls) return "host " + host_id + " has the wrong class";
    if (node.binding.capability && !host.capabilities.contains(*node.binding.capability))
      return "host " + host_id + " lacks capability " + *node.binding.capability;
    if (desc->category == core::Category::sensing && !host.capabilities.contains(desc->capability))
      return "host " + host_id + " lacks capability " + desc->capability;
    if (host.cls == net::HostClass::sensor && !host.preloaded_repository.contains(node.cm))
      return "cm " + node.cm + " is outside the package of " + host_id;
    std::map<HostId, HostId> corr;
    if (host.cls == net::HostClass::light) {
      auto c = ctx_.correspondent(host_id);
      if (!c) return "light host " + host_id + " has no correspondent";
      corr[host_id] = *c;
    }
    auto plan = platform::plan_pe_deployment(node.id, slot_for(host, corr));
    for (const auto& [h, mem] : platform::memory_by_host(plan, ctx_.params.footprints, desc->memory_footprint))
      if (mem > free_of(h)) return "capacity exceeded on host " + h;
    return std::nullopt;
  }

  std::vector<HostId> candidates(const ConfigNode& node) const {
    if (node.binding.host) {
      if (static_problem(node, *node.binding.host)) return {};
      return {*node.binding.host};
    }
    HostId anchor = ctx_.supervisor;
    bool anchored = false;
    for (const auto& e : config_.edges)
      if (!anchored && e.target == node.id && bound_.contains(e.source)) {
        anchor = bound_.at(e.source);
        anchored = true;
      }
    for (const auto& e : config_.edges)
      if (!anchored && e.source == node.id && bound_.contains(e.target)) {
        anchor = bound_.at(e.target);
        anchored = true;
      }
    std::vector<std::pair<int, HostId>> ranked;
    for (const auto& [id, host] : ctx_.hosts) {
      if (static_problem(node, id)) continue;
      auto h = ctx_.hops(id, anchor);
      if (!h) continue;
      ranked.emplace_back(*h, id);
    }
    std::sort(ranked.begin(), ranked.end());
    std::vector<HostId> out;
    for (auto& [h, id] : ranked) out.push_back(std::move(id));
    return out;
  }

  std::optional<Binding> run() {
    if (!search(0)) return std::nullopt;
    Binding b;
    b.node_hosts = bound_;
    b.correspondents = corr_;
    return b;
  }

  double free_of(const HostId& h) const {
    const auto& host = ctx_.hosts.at(h);
    auto it = demand_.find(h);
    return host.free_memory() - (it == demand_.end() ? 0.0 : it->second);
  }

 private:
  bool commit(const std::map<HostId, double>& mem) {
    for (const auto& [h, m] : mem)
      if (m > free_of(h)) return false;
    for (const auto& [h, m] : mem) demand_[h] += m;
    return true;
  }

  void release(const std::map<HostId, double>& mem) {
    for (const auto& [h, m] : mem) demand_[h] -= m;
  }

  bool search(std::size_t depth) {
    if (depth == order_.size()) return edges_fit();
    const auto& node = config_.nodes[order_[depth]];
    const auto* desc = ctx_.repository.find(node.cm);
    for (const auto& h : candidates(node)) {
      if (used_.contains({node.cm, h})) continue;
      const auto& host = ctx_.hosts.at(h);
      auto saved_corr = corr_;
      if (host.cls == net::HostClass::light) corr_[h] = *ctx_.correspondent(h);
      auto mem = platform::memory_by_host(platform::plan_pe_deployment(node.id, slot_for(host, corr_)),
                                          ctx_.params.footprints, desc->memory_footprint);
      if (commit(mem)) {
        bound_[node.id] = h;
        used_.insert({node.cm, h});
        if (search(depth + 1)) return true;
        used_.erase({node.cm, h});
        bound_.erase(node.id);
        release(mem);
      }
      corr_ = std::move(saved_corr);
    }
    return false;
  }

  bool edges_fit() {
    std::vector<std::map<HostId, double>> committed;
    bool ok = true;
    for (const auto& e : config_.edges) {
      const auto& a = bound_.at(e.source);
      const auto& b = bound_.at(e.target);
      if (a != b && !(ctx_.reachable(a, b) && ctx_.reachable(b, a))) {
        ok = false;
        break;
      }
      auto plan = platform::plan_conduit_deployment(e.source + "->" + e.target, slot_for(ctx_.hosts.at(a), corr_),
                                                    slot_for(ctx_.hosts.at(b), corr_));
      auto mem = platform::memory_by_host(plan, ctx_.params.footprints);
      if (!commit(mem)) {
        ok = false;
        break;
      }
      committed.push_back(std::move(mem));
    }
    if (!ok)
      for (const auto& mem : committed) release(mem);
    return ok;
  }

  const ConfigurationGraph& config_;
  const ContextSnapshot& ctx_;
  std::vector<std::size_t> order_;
  std::map<std::string, HostId> bound_;
  std::map<HostId, double> demand_;
  std::set<std::pair<std::string, HostId>> used_;
  std::map<HostId, HostId> corr_;
};

std::vector<std::string> diagnose(const ConfigurationGraph& config, const ContextSnapshot& ctx) {
  std::vector<std::string> out;
  BindingSearch probe(config, ctx);
  std::map<std::string, HostId> greedy;
  for (const auto& node : config.nodes) {
    if (node.binding.host) {
      if (auto why = probe.static_problem(node, *node.binding.host)) {
        out.push_back("no host for node " + node.id);
        out.push_back("node " + node.id + ": " + *why);
        continue;
      }
      greedy[node.id] = *node.binding.host;
      continue;
    }
    bool any = false;
    for (const auto& [id, host] : ctx.hosts)
      if (!probe.static_problem(node, id)) {
        greedy[node.id] = id;
        any = true;
        break;
      }
    if (!any) out.push_back("no host for node " + node.id);
  }
  if (!out.empty()) return out;
  for (const auto& e : config.edges) {
    const auto& a = greedy.at(e.source);
    const auto& b = greedy.at(e.target);
    if (a != b && !(ctx.reachable(a, b) && ctx.reachable(b, a)))
      out.push_back("edge " + e.source + "->" + e.target + ": hosts " + a + " and " + b + " are not mutually reachable");
  }
  if (out.empty()) out.push_back("no joint binding satisfies capacity and reachability");
  return out;
}

double path_cost(const ContextSnapshot& ctx, const HostId& from, const HostId& to, double bytes) {
  auto p = ctx.path(from, to);
  double cost = 0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (!ctx.hosts.at(p[i]).is_fixed()) cost += ctx.params.energy.tx_cost(bytes);
    if (!ctx.hosts.at(p[i + 1]).is_fixed()) cost += ctx.params.energy.rx_cost(bytes);
  }
  return cost;
}

bool crosses_wireless(const ContextSnapshot& ctx, const HostId& from, const HostId& to) {
  auto p = ctx.path(from, to);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    auto it = ctx.links.find(net::make_pair_key(p[i], p[i + 1]));
    if (it != ctx.links.end() && it->second == net::LinkKind::wireless) return true;
  }
  return false;
}

double frames_per_tick(const core::BusinessComponentDescriptor& d) {
  return d.is_source() ? 1.0 / std::max(1, d.period) : 1.0;
}

}  // namespace

Validity is_valid(const ConfigurationGraph& config, const ContextSnapshot& context) {
  Validity v;
  auto sup = context.hosts.find(context.supervisor);
  if (sup == context.hosts.end() || !sup->second.alive) {
    v.violations.push_back("supervisor " + context.supervisor + " is down");
    return v;
  }
  BindingSearch search(config, context);
  v.binding = search.run();
  v.valid = v.binding.has_value();
  if (!v.valid) v.violations = diagnose(config, context);
  return v;
}

std::vector<std::string> check_binding(const ConfigurationGraph& config, const Binding& binding,
                                       const ContextSnapshot& context) {
  std::vector<std::string> out;
  auto sup = context.hosts.find(context.supervisor);
  if (sup == context.hosts.end() || !sup->second.alive) return {"supervisor " + context.supervisor + " is down"};
  BindingSearch probe(config, context);
  std::map<HostId, HostId> corr;
  std::map<HostId, double> demand;
  std::set<std::pair<std::string, HostId>> used;
  auto add = [&](const std::map<HostId, double>& mem) {
    for (const auto& [h, m] : mem) demand[h] += m;
  };
  for (const auto& node : config.nodes) {
    auto it = binding.node_hosts.find(node.id);
    if (it == binding.node_hosts.end()) {
      out.push_back("node " + node.id + " is unbound");
      continue;
    }
    const auto& h = it->second;
    if (node.binding.host && *node.binding.host != h) out.push_back("node " + node.id + " is not on " + *node.binding.host);
    if (auto why = probe.static_problem(node, h)) {
      out.push_back("node " + node.id + ": " + *why);
      continue;
    }
    if (!used.insert({node.cm, h}).second) out.push_back("cm " + node.cm + " bound twice on " + h);
    const auto& host = context.hosts.at(h);
    if (host.cls == net::HostClass::light) corr[h] = *context.correspondent(h);
    add(platform::memory_by_host(platform::plan_pe_deployment(node.id, slot_for(host, corr)),
                                 context.params.footprints, context.repository.at(node.cm).memory_footprint));
  }
  if (!out.empty()) return out;
  for (const auto& e : config.edges) {
    const auto& a = binding.node_hosts.at(e.source);
    const auto& b = binding.node_hosts.at(e.target);
    if (a != b && !(context.reachable(a, b) && context.reachable(b, a))) {
      out.push_back("edge " + e.source + "->" + e.target + ": hosts " + a + " and " + b + " are not mutually reachable");
      continue;
    }
    add(platform::memory_by_host(platform::plan_conduit_deployment(e.source + "->" + e.target,
                                                                   slot_for(context.hosts.at(a), corr),
                                                                   slot_for(context.hosts.at(b), corr)),
                                 context.params.footprints));
  }
  for (const auto& [h, m] : demand)
    if (m > context.hosts.at(h).free_memory()) out.push_back("capacity exceeded on host " + h);
  return out;
}

bool strictly_better_ignoring_id(const Score& a, const Score& b) {
  if (a.qos_level != b.qos_level) return a.qos_level > b.qos_level;
  if (a.energy_rate != b.energy_rate) return a.energy_rate < b.energy_rate;
  return a.wireless_conduits < b.wireless_conduits;
}

bool better(const Score& a, const Score& b) {
  if (strictly_better_ignoring_id(a, b)) return true;
  if (strictly_better_ignoring_id(b, a)) return false;
  return a.id < b.id;
}

double energy_rate(const ConfigurationGraph& config, const Binding& binding, const ContextSnapshot& ctx) {
  const double control = ctx.params.control_bytes;
  const double period = std::max(1, ctx.params.uc_report_period);
  auto channel = [&](const HostId& h) {
    auto c = binding.correspondents.find(h);
    if (c == binding.correspondents.end()) return 0.0;
    return path_cost(ctx, h, c->second, control) / period;
  };
  auto host_of = [&](const std::string& node) -> const HostId& {
    auto it = binding.node_hosts.find(node);
    if (it == binding.node_hosts.end()) throw Error(ErrorCode::UnboundNode, node);
    return it->second;
  };

  double rate = 0;
  for (const auto& n : config.nodes) {
    const auto& h = host_of(n.id);
    const auto& host = ctx.hosts.at(h);
    const auto& d = ctx.repository.at(n.cm);
    if (!host.is_fixed()) rate += d.cpu_cost * frames_per_tick(d);
    if (host.cls == net::HostClass::light) rate += channel(h);
  }
  for (const auto& e : config.edges) {
    const auto& a = host_of(e.source);
    const auto& b = host_of(e.target);
    const auto& src = ctx.repository.at(config.node(e.source)->cm);
    if (a != b)
      rate += frames_per_tick(src) * static_cast<double>(e.flows.size()) * path_cost(ctx, a, b, src.frame_bytes);
    for (const auto* end : {&a, &b})
      if (ctx.hosts.at(*end).cls == net::HostClass::light) rate += channel(*end);
  }
  return rate;
}

Score score_with(const ConfigurationGraph& config, const Binding& binding, const ContextSnapshot& context) {
  Score s{config.qos_level, energy_rate(config, binding, context), 0, config.id};
  for (const auto& e : config.edges) {
    const auto& a = binding.node_hosts.at(e.source);
    const auto& b = binding.node_hosts.at(e.target);
    if (a != b && crosses_wireless(context, a, b)) ++s.wireless_conduits;
  }
  return s;
}

Score score(const ConfigurationGraph& config, const ContextSnapshot& context) {
  auto v = is_valid(config, context);
  if (!v.valid) throw Error(ErrorCode::InvalidConfiguration, "configuration '" + config.id + "' is not valid");
  return score_with(config, *v.binding, context);
}

std::optional<Selection> select(const ConfigurationFamily& family, const ContextSnapshot& context,
                                const std::set<std::string>& excluded) {
  std::optional<Selection> best;
  for (const auto& config : family.configurations) {
    if (excluded.contains(config.id)) continue;
    auto v = is_valid(config, context);
    if (!v.valid) continue;
    auto s = score_with(config, *v.binding, context);
    if (!best || better(s, best->score)) best = Selection{&config, std::move(*v.binding), std::move(s)};
  }
  return best;
}

std::vector<RankedConfiguration> rank_configurations(const ConfigurationFamily& family,
                                                     const ContextSnapshot& context) {
  std::vector<RankedConfiguration> out;
  for (const auto& config : family.configurations) {
    RankedConfiguration r;
    r.id = config.id;
    auto v = is_valid(config, context);
    r.valid = v.valid;
    r.violations = std::move(v.violations);
    if (v.valid) {
      r.score = score_with(config, *v.binding, context);
      r.binding = std::move(v.binding);
    }
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), [](const RankedConfiguration& a, const RankedConfiguration& b) {
    if (a.valid != b.valid) return a.valid;
    if (!a.valid) return a.id < b.id;
    return better(*a.score, *b.score);
  });
  return out;
}

}  // namespace hetadapt::qos
