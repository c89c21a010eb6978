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

#include "hetadapt/sim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "hetadapt/common/error.hpp"

namespace hetadapt::sim {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view event_kind(const EventAction& action) {
  static constexpr std::string_view names[] = {"fail_link",     "fail_host",    "restore",  "move_host",
                                               "drain_battery", "inject_frame", "set_param"};
  return names[action.index()];
}

const qos::ConfigurationFamily& ScenarioSpec::family() const {
  for (const auto& f : families)
    if (f.application == application) return f;
  throw Error(ErrorCode::DanglingReference, "application '" + application + "'");
}

const net::Host* ScenarioSpec::host(const HostId& id) const {
  for (const auto& h : hosts)
    if (h.id == id) return &h;
  return nullptr;
}

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::InvalidValue, path + ": " + what);
}

[[noreturn]] void dangling(const std::string& id, const std::string& where) {
  throw Error(ErrorCode::DanglingReference, "'" + id + "' referenced by " + where);
}

void check_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) bad(path, "expected an object");
  for (const auto& [key, value] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) bad(path, "unknown key '" + key + "'");
}

const json* field(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double number(const json& j, const char* key, const std::string& path, std::optional<double> fallback = {}) {
  const auto* v = field(j, key);
  if (!v) {
    if (fallback) return *fallback;
    bad(path, std::string("missing '") + key + "'");
  }
  if (!v->is_number()) bad(path + "." + key, "expected a number");
  return v->get<double>();
}

std::int64_t integer(const json& j, const char* key, const std::string& path, std::optional<std::int64_t> fallback = {}) {
  const auto* v = field(j, key);
  if (!v) {
    if (fallback) return *fallback;
    bad(path, std::string("missing '") + key + "'");
  }
  if (!v->is_number_integer()) bad(path + "." + key, "expected an integer");
  return v->get<std::int64_t>();
}

std::string text(const json& j, const char* key, const std::string& path, std::optional<std::string> fallback = {}) {
  const auto* v = field(j, key);
  if (!v) {
    if (fallback) return *fallback;
    bad(path, std::string("missing '") + key + "'");
  }
  if (!v->is_string()) bad(path + "." + key, "expected a string");
  return v->get<std::string>();
}

std::vector<std::string> strings(const json& j, const char* key, const std::string& path) {
  const auto* v = field(j, key);
  if (!v) return {};
  if (!v->is_array()) bad(path + "." + key, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& s : *v) {
    if (!s.is_string()) bad(path + "." + key, "expected an array of strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

const json& array(const json& j, const char* key, const std::string& path, bool required) {
  static const json empty = json::array();
  const auto* v = field(j, key);
  if (!v) {
    if (required) bad(path, std::string("missing '") + key + "'");
    return empty;
  }
  if (!v->is_array()) bad(path + "." + key, "expected an array");
  return *v;
}

template <class E, class F>
E parse_enum(const json& j, const char* key, const std::string& path, F from_string, std::optional<E> fallback = {}) {
  const auto* v = field(j, key);
  if (!v && fallback) return *fallback;
  auto s = text(j, key, path);
  try {
    return from_string(s);
  } catch (const Error&) {
    bad(path + "." + key, "unknown value '" + s + "'");
  }
}

platform::Params parse_params(const json& j) {
  platform::Params p;
  if (j.is_null()) return p;
  const std::string path = "params";
  check_keys(j, path,
             {"alpha", "beta", "gamma", "hello_miss", "mailbox_capacity", "footprints", "control_bytes",
              "uc_report_period", "ack_timeout", "seed"});
  p.energy.alpha = number(j, "alpha", path, p.energy.alpha);
  p.energy.beta = number(j, "beta", path, p.energy.beta);
  p.energy.gamma = number(j, "gamma", path, p.energy.gamma);
  p.hello_miss = static_cast<int>(integer(j, "hello_miss", path, p.hello_miss));
  p.mailbox_capacity = static_cast<std::size_t>(std::max<std::int64_t>(0, integer(j, "mailbox_capacity", path, 16)));
  if (integer(j, "mailbox_capacity", path, 16) < 1) bad(path + ".mailbox_capacity", "must be at least 1");
  p.control_bytes = number(j, "control_bytes", path, p.control_bytes);
  p.uc_report_period = static_cast<int>(integer(j, "uc_report_period", path, p.uc_report_period));
  p.ack_timeout = static_cast<int>(integer(j, "ack_timeout", path, p.ack_timeout));
  auto seed = integer(j, "seed", path, 0);
  if (seed < 0) bad(path + ".seed", "must be non-negative");
  p.seed = static_cast<std::uint64_t>(seed);
  if (const auto* f = field(j, "footprints")) {
    const std::string fp = path + ".footprints";
    check_keys(*f, fp, {"ue", "us", "uc_stub", "uc_full", "uc_logic", "endpoint", "conduit_uc"});
    auto& t = p.footprints;
    t.ue = number(*f, "ue", fp, t.ue);
    t.us = number(*f, "us", fp, t.us);
    t.uc_stub = number(*f, "uc_stub", fp, t.uc_stub);
    t.uc_full = number(*f, "uc_full", fp, t.uc_full);
    t.uc_logic = number(*f, "uc_logic", fp, t.uc_logic);
    t.endpoint = number(*f, "endpoint", fp, t.endpoint);
    t.conduit_uc = number(*f, "conduit_uc", fp, t.conduit_uc);
  }
  return p;
}

net::Host parse_host(const json& j, const std::string& path) {
  check_keys(j, path, {"id", "class", "x", "y", "radio_range", "memory", "battery", "capabilities"});
  net::Host h;
  h.id = text(j, "id", path);
  h.cls = parse_enum<net::HostClass>(j, "class", path, net::host_class_from_string);
  h.position = {number(j, "x", path, 0.0), number(j, "y", path, 0.0)};
  h.radio_range = number(j, "radio_range", path, 0.0);
  h.memory_capacity = number(j, "memory", path, h.is_fixed() ? net::kUnboundedMemory : 32.0);
  h.battery_initial = number(j, "battery", path,
                             h.is_fixed() ? std::numeric_limits<double>::infinity() : 1e6);
  for (auto& c : strings(j, "capabilities", path)) h.capabilities.insert(std::move(c));
  return h;
}

core::BusinessComponentDescriptor parse_descriptor(const json& j, const std::string& path) {
  check_keys(j, path,
             {"id", "style", "inputs", "outputs", "memory", "cpu_cost", "category", "capability", "frame_bytes",
              "period", "transform"});
  core::BusinessComponentDescriptor d;
  d.id = text(j, "id", path);
  d.interaction_style = parse_enum<core::InteractionStyle>(j, "style", path, core::interaction_style_from_string,
                                                           core::InteractionStyle::event);
  d.input_flows = strings(j, "inputs", path);
  d.output_flows = strings(j, "outputs", path);
  d.memory_footprint = static_cast<int>(integer(j, "memory", path, 1));
  d.cpu_cost = static_cast<int>(integer(j, "cpu_cost", path, 0));
  auto category = text(j, "category", path, "software");
  if (category == "software") d.category = core::Category::software;
  else if (category == "sensing") d.category = core::Category::sensing;
  else bad(path + ".category", "unknown value '" + category + "'");
  d.capability = text(j, "capability", path, "");
  d.frame_bytes = static_cast<int>(integer(j, "frame_bytes", path, 64));
  d.period = static_cast<int>(integer(j, "period", path, 1));
  if (const auto* t = field(j, "transform")) {
    check_keys(*t, path + ".transform", {"kind", "param"});
    d.transform.kind = parse_enum<core::Transform::Kind>(*t, "kind", path + ".transform", core::transform_kind_from_string,
                                                         core::Transform::Kind::passthrough);
    d.transform.param = static_cast<int>(integer(*t, "param", path + ".transform", 1));
  }
  try {
    core::validate(d);
  } catch (const Error& e) {
    bad(path, e.what());
  }
  return d;
}

qos::ConfigurationGraph parse_configuration(const json& j, const std::string& path) {
  check_keys(j, path, {"id", "qos_level", "nodes", "edges"});
  qos::ConfigurationGraph c;
  c.id = text(j, "id", path);
  c.qos_level = static_cast<int>(integer(j, "qos_level", path));
  const auto& nodes = array(j, "nodes", path, true);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto np = path + ".nodes[" + std::to_string(i) + "]";
    check_keys(nodes[i], np, {"id", "cm", "host", "class", "capability"});
    qos::ConfigNode n;
    n.cm = text(nodes[i], "cm", np);
    n.id = text(nodes[i], "id", np, n.cm);
    if (field(nodes[i], "host")) n.binding.host = text(nodes[i], "host", np);
    if (field(nodes[i], "class"))
      n.binding.cls = parse_enum<net::HostClass>(nodes[i], "class", np, net::host_class_from_string);
    if (field(nodes[i], "capability")) n.binding.capability = text(nodes[i], "capability", np);
    c.nodes.push_back(std::move(n));
  }
  const auto& edges = array(j, "edges", path, false);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto ep = path + ".edges[" + std::to_string(i) + "]";
    check_keys(edges[i], ep, {"from", "to", "constraints", "flows"});
    qos::ConfigEdge e;
    e.source = text(edges[i], "from", ep);
    e.target = text(edges[i], "to", ep);
    for (const auto& s : strings(edges[i], "constraints", ep)) {
      try {
        e.constraints.insert(qos::edge_constraint_from_string(s));
      } catch (const Error&) {
        bad(ep + ".constraints", "unknown constraint '" + s + "'");
      }
    }
    e.flows = strings(edges[i], "flows", ep);
    c.edges.push_back(std::move(e));
  }
  return c;
}

qos::ConfigurationFamily parse_family(const json& j, const std::string& path) {
  check_keys(j, path, {"application", "supervisor", "configurations"});
  qos::ConfigurationFamily f;
  f.application = text(j, "application", path);
  f.supervisor = text(j, "supervisor", path);
  const auto& configs = array(j, "configurations", path, true);
  for (std::size_t i = 0; i < configs.size(); ++i)
    f.configurations.push_back(parse_configuration(configs[i], path + ".configurations[" + std::to_string(i) + "]"));
  return f;
}

ScenarioEvent parse_event(const json& j, const std::string& path) {
  check_keys(j, path, {"tick", "kind", "args"});
  ScenarioEvent ev;
  ev.tick = integer(j, "tick", path);
  auto kind = text(j, "kind", path);
  static const json no_args = json::object();
  const json& a = field(j, "args") ? j["args"] : no_args;
  const auto ap = path + ".args";
  if (kind == "fail_link") {
    check_keys(a, ap, {"a", "b"});
    ev.action = event::FailLink{text(a, "a", ap), text(a, "b", ap)};
  } else if (kind == "fail_host") {
    check_keys(a, ap, {"host"});
    ev.action = event::FailHost{text(a, "host", ap)};
  } else if (kind == "restore") {
    check_keys(a, ap, {"host", "a", "b"});
    if (field(a, "host")) {
      if (field(a, "a") || field(a, "b")) bad(ap, "restore takes either 'host' or 'a' and 'b'");
      ev.action = event::Restore{text(a, "host", ap), std::nullopt};
    } else {
      ev.action = event::Restore{text(a, "a", ap), text(a, "b", ap)};
    }
  } else if (kind == "move_host") {
    check_keys(a, ap, {"host", "x", "y"});
    ev.action = event::MoveHost{text(a, "host", ap), number(a, "x", ap), number(a, "y", ap)};
  } else if (kind == "drain_battery") {
    check_keys(a, ap, {"host", "amount"});
    ev.action = event::DrainBattery{text(a, "host", ap), number(a, "amount", ap)};
  } else if (kind == "inject_frame") {
    check_keys(a, ap, {"cm", "host", "flow", "count", "bytes"});
    ev.action = event::InjectFrame{text(a, "cm", ap), text(a, "host", ap), text(a, "flow", ap),
                                   static_cast<int>(integer(a, "count", ap, 1)),
                                   static_cast<int>(integer(a, "bytes", ap, 64))};
  } else if (kind == "set_param") {
    check_keys(a, ap, {"key", "value", "host"});
    event::SetParam sp{text(a, "key", ap), number(a, "value", ap), std::nullopt};
    if (field(a, "host")) sp.host = text(a, "host", ap);
    ev.action = sp;
  } else {
    bad(path + ".kind", "unknown event kind '" + kind + "'");
  }
  return ev;
}

std::string position_message(const std::string& text, std::size_t byte, const std::string& what) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < std::min(byte > 0 ? byte - 1 : 0, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
}

}  // namespace

void validate(ScenarioSpec& spec) {
  const auto& p = spec.params;
  if (p.energy.alpha < 0 || p.energy.beta < 0 || p.energy.gamma < 0) bad("params", "energy constants must be >= 0");
  if (p.hello_miss < 1) bad("params.hello_miss", "must be at least 1");
  if (p.control_bytes < 0) bad("params.control_bytes", "must be >= 0");
  if (p.uc_report_period < 1) bad("params.uc_report_period", "must be at least 1");
  if (p.ack_timeout < 1) bad("params.ack_timeout", "must be at least 1");
  const auto& f = p.footprints;
  for (double v : {f.ue, f.us, f.uc_stub, f.uc_full, f.uc_logic, f.endpoint, f.conduit_uc})
    if (!(v > 0)) bad("params.footprints", "footprints must be > 0");

  if (spec.hosts.empty()) bad("hosts", "at least one host is required");
  std::set<HostId> ids;
  for (const auto& h : spec.hosts) {
    const auto path = "host '" + h.id + "'";
    if (h.id.empty()) bad("hosts", "host without id");
    if (!ids.insert(h.id).second) bad(path, "duplicate host id");
    if (h.radio_range < 0) bad(path, "negative radio_range");
    if (!(h.memory_capacity > 0)) bad(path, "memory must be > 0");
    if (std::isnan(h.battery_initial) || h.battery_initial < 0) bad(path, "negative battery");
    if (h.cls != net::HostClass::sensor && !h.preloaded_repository.empty())
      bad(path, "only sensor hosts carry a package");
    for (const auto& cm : h.preloaded_repository)
      if (!spec.repository.contains(cm)) dangling(cm, "the package of '" + h.id + "'");
  }
  auto require_host = [&](const HostId& id, const std::string& where) {
    if (!ids.contains(id)) dangling(id, where);
  };

  std::set<net::HostPair> seen_links;
  for (const auto& [a, b] : spec.links) {
    require_host(a, "a link");
    require_host(b, "a link");
    if (a == b) bad("links", "self link on '" + a + "'");
    if (!seen_links.insert(net::make_pair_key(a, b)).second) bad("links", "duplicate link " + a + "-" + b);
  }

  if (spec.families.empty()) bad("families", "at least one family is required");
  std::set<std::string> apps;
  for (auto& fam : spec.families) {
    if (!apps.insert(fam.application).second) bad("families", "two families for application '" + fam.application + "'");
    require_host(fam.supervisor, "the supervisor of '" + fam.application + "'");
    if (!spec.host(fam.supervisor)->is_fixed()) bad("families", "supervisor '" + fam.supervisor + "' is not fixed");
    for (const auto& c : fam.configurations)
      for (const auto& n : c.nodes)
        if (n.binding.host) require_host(*n.binding.host, "node '" + n.id + "' of '" + c.id + "'");
    qos::normalize(fam, spec.repository);
  }
  if (!apps.contains(spec.application)) dangling(spec.application, "'application'");

  for (std::size_t i = 0; i < spec.events.size(); ++i) {
    auto& ev = spec.events[i];
    const auto where = "event " + std::to_string(i) + " (" + std::string(event_kind(ev.action)) + ")";
    if (ev.tick < 0) bad(where, "negative tick");
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, event::FailLink>) {
            require_host(a.a, where);
            require_host(a.b, where);
          } else if constexpr (std::is_same_v<T, event::Restore>) {
            require_host(a.a, where);
            if (a.b) require_host(*a.b, where);
          } else if constexpr (std::is_same_v<T, event::DrainBattery>) {
            require_host(a.host, where);
            if (a.amount < 0) bad(where, "negative amount");
          } else if constexpr (std::is_same_v<T, event::InjectFrame>) {
            require_host(a.host, where);
            if (!spec.repository.contains(a.cm)) dangling(a.cm, where);
            if (a.count < 0 || a.bytes < 0) bad(where, "negative count or bytes");
          } else if constexpr (std::is_same_v<T, event::SetParam>) {
            bool global = std::find(std::begin(kGlobalParams), std::end(kGlobalParams), a.key) != std::end(kGlobalParams);
            bool per_host = std::find(std::begin(kHostParams), std::end(kHostParams), a.key) != std::end(kHostParams);
            if (a.host) {
              require_host(*a.host, where);
              if (!per_host) bad(where, "'" + a.key + "' is not a host parameter");
            } else if (!global) {
              bad(where, "unknown parameter '" + a.key + "'");
            }
            if (a.value < 0) bad(where, "negative value");
          } else {
            require_host(a.host, where);
          }
        },
        ev.action);
  }
  std::stable_sort(spec.events.begin(), spec.events.end(),
                   [](const ScenarioEvent& a, const ScenarioEvent& b) { return a.tick < b.tick; });
}

ScenarioSpec parse_scenario(const std::string& source) {
  json j;
  try {
    j = json::parse(source);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, position_message(source, e.byte, e.what()));
  }
  check_keys(j, "scenario", {"params", "hosts", "links", "repository", "packages", "families", "application", "events"});

  ScenarioSpec spec;
  spec.params = parse_params(field(j, "params") ? j["params"] : json());
  const auto& hosts = array(j, "hosts", "scenario", true);
  for (std::size_t i = 0; i < hosts.size(); ++i) spec.hosts.push_back(parse_host(hosts[i], "hosts[" + std::to_string(i) + "]"));
  const auto& links = array(j, "links", "scenario", false);
  for (std::size_t i = 0; i < links.size(); ++i) {
    auto lp = "links[" + std::to_string(i) + "]";
    check_keys(links[i], lp, {"a", "b"});
    spec.links.emplace_back(text(links[i], "a", lp), text(links[i], "b", lp));
  }
  const auto& repo = array(j, "repository", "scenario", true);
  for (std::size_t i = 0; i < repo.size(); ++i) {
    auto d = parse_descriptor(repo[i], "repository[" + std::to_string(i) + "]");
    if (spec.repository.contains(d.id)) bad("repository", "duplicate cm '" + d.id + "'");
    spec.repository.add(std::move(d));
  }
  if (const auto* packages = field(j, "packages")) {
    if (!packages->is_object()) bad("packages", "expected an object");
    for (const auto& [host_id, cms] : packages->items()) {
      auto it = std::find_if(spec.hosts.begin(), spec.hosts.end(), [&](const net::Host& h) { return h.id == host_id; });
      if (it == spec.hosts.end()) dangling(host_id, "'packages'");
      if (it->cls != net::HostClass::sensor) bad("packages", "'" + host_id + "' is not a sensor host");
      json wrapper = {{"cms", cms}};
      for (auto& cm : strings(wrapper, "cms", "packages." + host_id)) it->preloaded_repository.insert(std::move(cm));
    }
  }
  const auto& families = array(j, "families", "scenario", true);
  for (std::size_t i = 0; i < families.size(); ++i)
    spec.families.push_back(parse_family(families[i], "families[" + std::to_string(i) + "]"));
  spec.application = text(j, "application", "scenario",
                          spec.families.size() == 1 ? std::optional<std::string>(spec.families.front().application)
                                                    : std::nullopt);
  const auto& events = array(j, "events", "scenario", false);
  for (std::size_t i = 0; i < events.size(); ++i) spec.events.push_back(parse_event(events[i], "events[" + std::to_string(i) + "]"));

  validate(spec);
  return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string serialize_scenario(const ScenarioSpec& spec) {
  ordered_json j;
  const auto& p = spec.params;
  const auto& f = p.footprints;
  j["params"] = {{"alpha", p.energy.alpha},
                 {"beta", p.energy.beta},
                 {"gamma", p.energy.gamma},
                 {"hello_miss", p.hello_miss},
                 {"mailbox_capacity", p.mailbox_capacity},
                 {"footprints",
                  {{"ue", f.ue},
                   {"us", f.us},
                   {"uc_stub", f.uc_stub},
                   {"uc_full", f.uc_full},
                   {"uc_logic", f.uc_logic},
                   {"endpoint", f.endpoint},
                   {"conduit_uc", f.conduit_uc}}},
                 {"control_bytes", p.control_bytes},
                 {"uc_report_period", p.uc_report_period},
                 {"ack_timeout", p.ack_timeout},
                 {"seed", p.seed}};

  auto hosts = ordered_json::array();
  auto packages = ordered_json::object();
  for (const auto& h : spec.hosts) {
    ordered_json o{{"id", h.id},
                   {"class", std::string(net::to_string(h.cls))},
                   {"x", h.position.x},
                   {"y", h.position.y},
                   {"radio_range", h.radio_range},
                   {"memory", h.memory_capacity}};
    if (std::isfinite(h.battery_initial)) o["battery"] = h.battery_initial;
    o["capabilities"] = std::vector<std::string>(h.capabilities.begin(), h.capabilities.end());
    hosts.push_back(std::move(o));
    if (!h.preloaded_repository.empty())
      packages[h.id] = std::vector<std::string>(h.preloaded_repository.begin(), h.preloaded_repository.end());
  }
  j["hosts"] = std::move(hosts);

  auto links = ordered_json::array();
  for (const auto& [a, b] : spec.links) links.push_back({{"a", a}, {"b", b}});
  j["links"] = std::move(links);

  auto repo = ordered_json::array();
  for (const auto& [id, d] : spec.repository.all()) {
    repo.push_back({{"id", d.id},
                    {"style", std::string(core::to_string(d.interaction_style))},
                    {"inputs", d.input_flows},
                    {"outputs", d.output_flows},
                    {"memory", d.memory_footprint},
                    {"cpu_cost", d.cpu_cost},
                    {"category", d.category == core::Category::sensing ? "sensing" : "software"},
                    {"capability", d.capability},
                    {"frame_bytes", d.frame_bytes},
                    {"period", d.period},
                    {"transform", {{"kind", std::string(core::to_string(d.transform.kind))}, {"param", d.transform.param}}}});
  }
  j["repository"] = std::move(repo);
  j["packages"] = std::move(packages);

  auto families = ordered_json::array();
  for (const auto& fam : spec.families) {
    auto configs = ordered_json::array();
    for (const auto& c : fam.configurations) {
      auto nodes = ordered_json::array();
      for (const auto& n : c.nodes) {
        ordered_json o{{"id", n.id}, {"cm", n.cm}};
        if (n.binding.host) o["host"] = *n.binding.host;
        if (n.binding.cls) o["class"] = std::string(net::to_string(*n.binding.cls));
        if (n.binding.capability) o["capability"] = *n.binding.capability;
        nodes.push_back(std::move(o));
      }
      auto edges = ordered_json::array();
      for (const auto& e : c.edges) {
        std::vector<std::string> constraints;
        for (auto k : e.constraints) constraints.emplace_back(qos::to_string(k));
        edges.push_back({{"from", e.source}, {"to", e.target}, {"constraints", constraints}, {"flows", e.flows}});
      }
      configs.push_back({{"id", c.id}, {"qos_level", c.qos_level}, {"nodes", nodes}, {"edges", edges}});
    }
    families.push_back({{"application", fam.application}, {"supervisor", fam.supervisor}, {"configurations", configs}});
  }
  j["families"] = std::move(families);
  j["application"] = spec.application;

  auto events = ordered_json::array();
  for (const auto& ev : spec.events) {
    ordered_json args = std::visit(
        [](const auto& a) -> ordered_json {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, event::FailLink>) return {{"a", a.a}, {"b", a.b}};
          else if constexpr (std::is_same_v<T, event::FailHost>) return {{"host", a.host}};
          else if constexpr (std::is_same_v<T, event::Restore>) {
            if (a.b) return {{"a", a.a}, {"b", *a.b}};
            return {{"host", a.a}};
          } else if constexpr (std::is_same_v<T, event::MoveHost>) return {{"host", a.host}, {"x", a.x}, {"y", a.y}};
          else if constexpr (std::is_same_v<T, event::DrainBattery>) return {{"host", a.host}, {"amount", a.amount}};
          else if constexpr (std::is_same_v<T, event::InjectFrame>)
            return {{"cm", a.cm}, {"host", a.host}, {"flow", a.flow}, {"count", a.count}, {"bytes", a.bytes}};
          else {
            ordered_json o{{"key", a.key}, {"value", a.value}};
            if (a.host) o["host"] = *a.host;
            return o;
          }
        },
        ev.action);
    events.push_back({{"tick", ev.tick}, {"kind", std::string(event_kind(ev.action))}, {"args", args}});
  }
  j["events"] = std::move(events);
  return j.dump(2) + "\n";
}

}  // namespace hetadapt::sim
