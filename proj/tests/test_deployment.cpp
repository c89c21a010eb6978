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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hetadapt/common/error.hpp"
#include "hetadapt/platform/deployment.hpp"
#include "hetadapt/platform/factories.hpp"
#include "hetadapt/platform/world.hpp"
#include "hetadapt/sim/simulation.hpp"
#include "support.hpp"

using namespace hetadapt;
using namespace hetadapt::platform;
using net::Fragment;
using net::HostClass;

namespace {

template <typename F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidValue;
}

std::vector<std::tuple<Fragment, Side, HostId>> flatten(const DeploymentPlan& plan) {
  std::vector<std::tuple<Fragment, Side, HostId>> out;
  for (const auto& p : plan.placements) out.emplace_back(p.fragment, p.side, p.host);
  std::sort(out.begin(), out.end());
  return out;
}

net::Host make_host(std::string id, HostClass cls, double x, double y, double range, double memory = 32) {
  net::Host h;
  h.id = std::move(id);
  h.cls = cls;
  h.position = {x, y};
  h.radio_range = range;
  if (cls != HostClass::fixed) {
    h.memory_capacity = memory;
    h.battery_initial = 1e6;
  }
  return h;
}

core::BusinessComponentDescriptor descriptor(std::string id, std::vector<FlowId> in, std::vector<FlowId> out,
                                             std::int64_t memory = 4) {
  core::BusinessComponentDescriptor d;
  d.id = std::move(id);
  d.input_flows = std::move(in);
  d.output_flows = std::move(out);
  d.memory_footprint = memory;
  return d;
}

// F1 - F2 wired; L1 near F1 over radio; S1 (infrared, package {probe}) near F1;
// F9 far away and unwired.
std::unique_ptr<World> small_world() {
  net::Topology t;
  t.add_host(make_host("F1", HostClass::fixed, 0, 0, 50));
  t.add_host(make_host("F2", HostClass::fixed, 300, 0, 0));
  t.add_host(make_host("F9", HostClass::fixed, 900, 900, 0));
  t.add_host(make_host("L1", HostClass::light, 30, 0, 50));
  auto s1 = make_host("S1", HostClass::sensor, 0, 30, 50, 16);
  s1.capabilities = {"infrared"};
  s1.preloaded_repository = {"probe"};
  t.add_host(s1);
  t.add_wired_link("F1", "F2");

  core::Repository repo;
  auto probe = descriptor("probe", {}, {"reading"}, 2);
  probe.category = core::Category::sensing;
  probe.capability = "infrared";
  repo.add(probe);
  auto logger = descriptor("logger", {"reading"}, {}, 4);
  logger.interaction_style = core::InteractionStyle::mailbox;
  repo.add(logger);
  repo.add(descriptor("relay", {"reading"}, {"reading"}, 3));
  repo.add(descriptor("huge", {"reading"}, {}, 500));

  Params p;
  p.mailbox_capacity = 7;
  return std::make_unique<World>(p, std::move(t), std::move(repo));
}

qos::BoundEdge edge(std::string src_cm, HostId src, std::string dst_cm, HostId dst,
                    core::TransportPolicy policy = core::TransportPolicy::fifo) {
  return {{std::move(src_cm), std::move(src)}, {std::move(dst_cm), std::move(dst)}, policy, {"reading"}};
}

routing::RouteTable table(HostId owner, std::map<HostId, int> hops) {
  routing::RouteTable t;
  t.owner = owner;
  t.entries[owner] = {owner, 0, 1};
  for (const auto& [dest, h] : hops) t.entries[dest] = {"X", h, 1};
  return t;
}

std::map<HostId, net::Host> hosts_for_correspondence() {
  std::map<HostId, net::Host> hosts;
  for (auto id : {"F1", "F2", "F3"}) hosts[id] = make_host(id, HostClass::fixed, 0, 0, 0);
  hosts["L1"] = make_host("L1", HostClass::light, 0, 0, 50);
  hosts["L2"] = make_host("L2", HostClass::light, 0, 0, 50);
  return hosts;
}

}  // namespace

TEST_CASE("PE fragments per host class") {
  using T = std::tuple<Fragment, Side, HostId>;
  auto fixed = plan_pe_deployment("x@F1", {"F1", HostClass::fixed, std::nullopt});
  CHECK(flatten(fixed) == std::vector<T>{{Fragment::CM, Side::none, "F1"},
                                         {Fragment::UE, Side::none, "F1"},
                                         {Fragment::US, Side::none, "F1"},
                                         {Fragment::UC_full, Side::none, "F1"}});

  auto light = plan_pe_deployment("x@L1", {"L1", HostClass::light, "F2"});
  CHECK(flatten(light) == std::vector<T>{{Fragment::CM, Side::none, "L1"},
                                         {Fragment::UE, Side::none, "L1"},
                                         {Fragment::US, Side::none, "L1"},
                                         {Fragment::UC_stub, Side::none, "L1"},
                                         {Fragment::UC_logic, Side::none, "F2"}});

  auto sensor = plan_pe_deployment("x@S1", {"S1", HostClass::sensor, "F2"});
  for (const auto& p : sensor.placements) CHECK(p.host == "S1");

  CHECK(error_of([] { plan_pe_deployment("x@L1", {"L1", HostClass::light, std::nullopt}); }) ==
        ErrorCode::NoCorrespondent);
}

TEST_CASE("conduit fragments follow each end's host class") {
  auto plan = plan_conduit_deployment("c", {"F1", HostClass::fixed, std::nullopt}, {"L1", HostClass::light, "F2"});
  CHECK(plan.host_of(Fragment::ENDPOINT_IN, Side::in) == HostId("F1"));
  CHECK(plan.host_of(Fragment::CONDUIT_UC, Side::in) == HostId("F1"));
  CHECK(plan.host_of(Fragment::ENDPOINT_OUT, Side::out) == HostId("L1"));
  CHECK(plan.host_of(Fragment::UC_stub, Side::out) == HostId("L1"));
  CHECK(plan.host_of(Fragment::CONDUIT_UC, Side::out) == HostId("F2"));

  net::Footprints fp;
  auto mem = memory_by_host(plan, fp);
  CHECK(mem["F1"] == doctest::Approx(fp.endpoint + fp.conduit_uc));
  CHECK(mem["L1"] == doctest::Approx(fp.endpoint + fp.uc_stub));
  CHECK(mem["F2"] == doctest::Approx(fp.conduit_uc));
}

TEST_CASE("memory per host charges the CM footprint to the CM fragment only") {
  net::Footprints fp;
  auto plan = plan_pe_deployment("x@L1", {"L1", HostClass::light, "F1"});
  auto mem = memory_by_host(plan, fp, 10);
  CHECK(mem["L1"] == doctest::Approx(10 + fp.ue + fp.us + fp.uc_stub));
  CHECK(mem["F1"] == doctest::Approx(fp.uc_logic));
  auto demands = demands_by_host(plan, 10);
  CHECK(demands["L1"].size() == 4);
  CHECK(demands["F1"].size() == 1);
}

TEST_CASE("correspondent choice") {
  auto hosts = hosts_for_correspondence();
  SUBCASE("nearest fixed host wins regardless of id") {
    CHECK(assign_correspondent("L1", hosts, table("L1", {{"F1", 3}, {"F2", 1}})) == "F2");
    CHECK(assign_correspondent("L1", hosts, table("L1", {{"F1", 1}, {"F3", 3}})) == "F1");
  }
  SUBCASE("ties go to the lower id") {
    CHECK(assign_correspondent("L1", hosts, table("L1", {{"F3", 2}, {"F2", 2}})) == "F2");
  }
  SUBCASE("light hosts are never correspondents") {
    CHECK(assign_correspondent("L1", hosts, table("L1", {{"L2", 1}, {"F3", 4}})) == "F3");
  }
  SUBCASE("dead fixed hosts are skipped") {
    hosts["F1"].alive = false;
    CHECK(assign_correspondent("L1", hosts, table("L1", {{"F1", 1}, {"F2", 2}})) == "F2");
  }
  SUBCASE("no reachable fixed host") {
    CHECK(error_of([&] { assign_correspondent("L1", hosts, table("L1", {{"L2", 1}})); }) ==
          ErrorCode::NoCorrespondent);
    CHECK_FALSE(find_correspondent("L1", hosts, table("L1", {})));
  }
}

TEST_CASE("container factory") {
  auto w = small_world();

  SUBCASE("adapter follows the interaction style") {
    auto id = build_container(*w, {"logger", "F1", std::nullopt});
    const auto& pe = w->components.pe(id);
    CHECK(adapter_for(pe.style) == Adapter::mailbox);
    CHECK(pe.mailbox_capacity == 7);
    CHECK(pe.state == core::ComponentState::created);
    auto relay = build_container(*w, {"relay", "F1", std::nullopt});
    CHECK(adapter_for(w->components.pe(relay).style) == Adapter::push_on_arrival);
    CHECK(w->plans.contains(id));
  }

  SUBCASE("light container deports its control unit") {
    auto id = build_container(*w, {"relay", "L1", "F1"});
    CHECK(w->plans.at(id).plan.host_of(Fragment::UC_logic) == HostId("F1"));
    CHECK(w->correspondents.at("L1") == "F1");
    net::Footprints fp;
    CHECK(w->topology.host("L1").memory_used == doctest::Approx(3 + fp.ue + fp.us + fp.uc_stub));
  }

  SUBCASE("errors") {
    CHECK(error_of([&] { build_container(*w, {"nope", "F1", std::nullopt}); }) == ErrorCode::UnknownDescriptor);
    CHECK(error_of([&] { build_container(*w, {"relay", "S1", std::nullopt}); }) == ErrorCode::ClosedWorldViolation);
    CHECK(error_of([&] { build_container(*w, {"relay", "L1", std::nullopt}); }) == ErrorCode::NoCorrespondent);
    CHECK(error_of([&] { build_container(*w, {"relay", "L1", "L1"}); }) == ErrorCode::NoCorrespondent);
    CHECK(error_of([&] { build_container(*w, {"huge", "L1", "F1"}); }) == ErrorCode::CapacityExceeded);
    CHECK(error_of([&] { build_container(*w, {"relay", "Q7", std::nullopt}); }) == ErrorCode::UnknownEntity);
    w->kill_host("F2", "failure");
    CHECK(error_of([&] { build_container(*w, {"relay", "F2", std::nullopt}); }) == ErrorCode::UnknownEntity);
    CHECK(w->components.pes().empty());
  }

  SUBCASE("sensor container from its package") {
    auto id = build_container(*w, {"probe", "S1", std::nullopt});
    for (const auto& p : w->plans.at(id).plan.placements) CHECK(p.host == "S1");
  }
}

TEST_CASE("conduit factory") {
  auto w = small_world();
  build_container(*w, {"probe", "S1", std::nullopt});
  build_container(*w, {"relay", "F1", std::nullopt});
  build_container(*w, {"logger", "F2", std::nullopt});
  build_container(*w, {"logger", "F9", std::nullopt});

  SUBCASE("fifo") {
    auto id = build_conduit(*w, {edge("probe", "S1", "relay", "F1"), std::nullopt, std::nullopt});
    const auto& c = w->components.conduit(id);
    CHECK(c.transport_policy == core::TransportPolicy::fifo);
    CHECK(c.source_host == "S1");
    CHECK(c.target_host == "F1");
    CHECK(w->components.pe("relay@F1").in_bound[0] == id);
  }

  SUBCASE("synchronized") {
    auto id = build_conduit(*w, {edge("relay", "F1", "logger", "F2", core::TransportPolicy::synchronized),
                                 std::nullopt, std::nullopt});
    CHECK(w->components.conduit(id).transport_policy == core::TransportPolicy::synchronized);
    CHECK(w->plans.at(id).plan.host_of(Fragment::CONDUIT_UC, Side::out) == HostId("F2"));
  }

  SUBCASE("no route") {
    CHECK(error_of([&] {
            build_conduit(*w, {edge("relay", "F1", "logger", "F9"), std::nullopt, std::nullopt});
          }) == ErrorCode::NoRoute);
    CHECK(w->components.conduits().empty());
  }

  SUBCASE("missing endpoint and busy port") {
    CHECK(error_of([&] {
            build_conduit(*w, {edge("relay", "F2", "logger", "F1"), std::nullopt, std::nullopt});
          }) == ErrorCode::UnknownEndpoint);
    build_conduit(*w, {edge("relay", "F1", "logger", "F2"), std::nullopt, std::nullopt});
    CHECK(error_of([&] {
            build_conduit(*w, {edge("relay", "F1", "logger", "F2", core::TransportPolicy::realtime_drop),
                               std::nullopt, std::nullopt});
          }) == ErrorCode::PortBusy);
  }

  SUBCASE("destroy is idempotent and frees memory") {
    auto before = w->topology.host("F1").memory_used;
    auto id = build_conduit(*w, {edge("relay", "F1", "logger", "F2"), std::nullopt, std::nullopt});
    CHECK(w->topology.host("F1").memory_used > before);
    destroy_conduit(*w, id);
    destroy_conduit(*w, id);
    CHECK(w->topology.host("F1").memory_used == doctest::Approx(before));
    CHECK_FALSE(w->plans.contains(id));
  }
}

TEST_CASE("property: memory in use equals the sum of every deployed plan") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto spec = testsupport::random_scenario(seed);
    sim::Simulation s(spec);
    for (int tick = 0; tick < 80; ++tick) {
      s.advance_tick();
      const auto& w = s.world();
      std::map<HostId, double> expected;
      for (const auto& [subject, dp] : w.plans)
        for (const auto& [h, mem] : memory_by_host(dp.plan, w.params.footprints, dp.cm_footprint))
          expected[h] += mem;
      for (const auto& [id, host] : w.topology.hosts()) {
        if (!host.alive) continue;
        CAPTURE(seed);
        CAPTURE(id);
        CHECK(host.memory_used == doctest::Approx(expected[id]));
        // A capacity lowered at run time may leave earlier deployments above it.
        if (host.memory_capacity == spec.host(id)->memory_capacity)
          CHECK(host.memory_used <= host.memory_capacity + 1e-9);
      }
    }
  }
}

TEST_CASE("property: fragments of every plan obey the per-class rules") {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    auto spec = testsupport::random_scenario(seed);
    sim::Simulation s(spec);
    for (int tick = 0; tick < 80; ++tick) {
      s.advance_tick();
      auto bad = testsupport::placement_violations(s.world());
      CAPTURE(seed);
      CHECK_MESSAGE(bad.empty(), (bad.empty() ? std::string() : bad.front()));
    }
  }
}
