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

#include <algorithm>
#include <random>

#include "hetadapt/common/error.hpp"
#include "hetadapt/qos/config.hpp"
#include "hetadapt/qos/script.hpp"
#include "hetadapt/sim/scenario.hpp"
#include "hetadapt/sim/simulation.hpp"
#include "support.hpp"

using namespace hetadapt;
using namespace hetadapt::qos;

namespace {

const char* kScoring = R"({
  "params": {"alpha": 50, "beta": 1, "gamma": 0.5},
  "hosts": [
    {"id": "F1", "class": "fixed", "x": 0, "y": 0, "radio_range": 60},
    {"id": "S1", "class": "sensor", "x": 40, "y": 0, "radio_range": 60, "capabilities": ["heat"]},
    {"id": "S2", "class": "sensor", "x": 0, "y": 40, "radio_range": 60, "capabilities": ["heat"]}
  ],
  "repository": [
    {"id": "sense-a", "category": "sensing", "capability": "heat", "outputs": ["t"], "memory": 2,
     "cpu_cost": 20, "frame_bytes": 20, "period": 1},
    {"id": "sense-b", "category": "sensing", "capability": "heat", "outputs": ["t"], "memory": 2,
     "cpu_cost": 20, "frame_bytes": 50, "period": 1},
    {"id": "sink", "inputs": ["t"], "memory": 2}
  ],
  "packages": {"S1": ["sense-a"], "S2": ["sense-b"]},
  "families": [{"application": "heat", "supervisor": "F1", "configurations": [
    {"id": "via-b", "qos_level": 1,
     "nodes": [{"id": "src", "cm": "sense-b", "host": "S2"}, {"id": "out", "cm": "sink", "host": "F1"}],
     "edges": [{"from": "src", "to": "out"}]},
    {"id": "via-a", "qos_level": 1,
     "nodes": [{"id": "src", "cm": "sense-a", "host": "S1"}, {"id": "out", "cm": "sink", "host": "F1"}],
     "edges": [{"from": "src", "to": "out"}]}
  ]}]
})";

const char* kPartitioned = R"({
  "hosts": [
    {"id": "F1", "class": "fixed"}, {"id": "F2", "class": "fixed"},
    {"id": "F3", "class": "fixed"}, {"id": "F4", "class": "fixed"}
  ],
  "links": [{"a": "F1", "b": "F2"}, {"a": "F3", "b": "F4"}],
  "repository": [{"id": "src", "outputs": ["v"], "period": 2}, {"id": "dst", "inputs": ["v"]}],
  "families": [{"application": "p", "supervisor": "F1", "configurations": [
    {"id": "across", "qos_level": 2,
     "nodes": [{"id": "a", "cm": "src", "host": "F1"}, {"id": "b", "cm": "dst", "host": "F3"}],
     "edges": [{"from": "a", "to": "b"}]},
    {"id": "far", "qos_level": 2,
     "nodes": [{"id": "a", "cm": "src", "host": "F3"}, {"id": "b", "cm": "dst", "host": "F4"}],
     "edges": [{"from": "a", "to": "b"}]},
    {"id": "near", "qos_level": 1,
     "nodes": [{"id": "a", "cm": "src", "host": "F1"}, {"id": "b", "cm": "dst", "host": "F2"}],
     "edges": [{"from": "a", "to": "b"}]}
  ]}]
})";

sim::ScenarioSpec spec_from(const char* text) { return sim::parse_scenario(text); }

sim::ScenarioSpec telesurveillance() {
  return sim::load_scenario(std::filesystem::path(HETADAPT_SOURCE_DIR) / "scenarios" / "telesurveillance.json");
}

bool mentions(const std::vector<std::string>& violations, const std::string& text) {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const std::string& v) { return v.find(text) != std::string::npos; });
}

ContextSnapshot context_at(const sim::ScenarioSpec& spec, Tick ticks) {
  sim::Simulation s(spec);
  s.run(ticks);
  return s.world().snapshot(spec.family().supervisor);
}

// Random memory squeeze on light and sensor hosts so that some configurations
// stop fitting.
void squeeze(ContextSnapshot& ctx, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> factor(0.1, 1.2);
  for (auto& [id, h] : ctx.hosts)
    if (!h.is_fixed() && rng() % 2 == 0) h.memory_capacity = std::floor(h.memory_capacity * factor(rng));
}

BoundNode bn(std::string cm, HostId host) { return {std::move(cm), std::move(host)}; }

BoundEdge be(BoundNode a, BoundNode b, core::TransportPolicy p = core::TransportPolicy::fifo) {
  return {std::move(a), std::move(b), p, {"v"}};
}

BoundConfiguration random_bound(std::mt19937_64& rng) {
  BoundConfiguration c;
  c.id = "r" + std::to_string(rng() % 100);
  std::set<BoundNode> nodes;
  int n = 1 + static_cast<int>(rng() % 5);
  for (int i = 0; i < n; ++i) nodes.insert(bn("cm" + std::to_string(rng() % 3), "H" + std::to_string(rng() % 3)));
  c.nodes.assign(nodes.begin(), nodes.end());
  std::shuffle(c.nodes.begin(), c.nodes.end(), rng);
  int m = static_cast<int>(rng() % 5);
  std::set<std::tuple<BoundNode, BoundNode, core::TransportPolicy>> seen;
  for (int i = 0; i < m; ++i) {
    auto a = c.nodes[rng() % c.nodes.size()];
    auto b = c.nodes[rng() % c.nodes.size()];
    auto p = static_cast<core::TransportPolicy>(rng() % 3);
    if (seen.insert({a, b, p}).second) c.edges.push_back(be(a, b, p));
  }
  return c;
}

}  // namespace

TEST_CASE("a configuration needing a dead sensor names the unbindable node") {
  auto spec = telesurveillance();
  auto ctx = context_at(spec, 60);
  REQUIRE_FALSE(ctx.hosts.at("S1").alive);
  auto v = is_valid(*spec.family().find("all-infrared"), ctx);
  CHECK_FALSE(v.valid);
  CHECK(mentions(v.violations, "no host for node ir-S1"));
  CHECK_FALSE(v.binding);
}

TEST_CASE("nodes in another partition make a configuration invalid") {
  auto spec = spec_from(kPartitioned);
  auto ctx = testsupport::initial_context(spec);
  auto across = is_valid(*spec.family().find("across"), ctx);
  CHECK_FALSE(across.valid);
  CHECK(mentions(across.violations, "unreachable from the supervisor"));
  CHECK_FALSE(is_valid(*spec.family().find("far"), ctx).valid);
  CHECK(is_valid(*spec.family().find("near"), ctx).valid);

  auto chosen = select(spec.family(), ctx);
  REQUIRE(chosen);
  CHECK(chosen->config->id == "near");
}

TEST_CASE("energy rate counts sensor cpu and each radio hop") {
  auto spec = spec_from(kScoring);
  auto ctx = testsupport::initial_context(spec);
  // cpu 20/tick, plus one frame per tick sent S -> F1: alpha + beta * bytes; fixed receivers are free.
  auto sa = score(*spec.family().find("via-a"), ctx);
  auto sb = score(*spec.family().find("via-b"), ctx);
  CHECK(sa.energy_rate == doctest::Approx(20 + 50 + 1.0 * 20));
  CHECK(sb.energy_rate == doctest::Approx(20 + 50 + 1.0 * 50));
  CHECK(sa.wireless_conduits == 1);
  CHECK(better(sa, sb));
  CHECK(select(spec.family(), ctx)->config->id == "via-a");

  SUBCASE("higher qos outranks lower energy") {
    auto family = spec.family();
    family.configurations[0].qos_level = 3;
    auto chosen = select(family, ctx);
    REQUIRE(chosen);
    CHECK(chosen->config->id == "via-b");
    CHECK(chosen->score.qos_level == 3);
  }

  SUBCASE("identical scores fall back to the id") {
    auto family = spec.family();
    auto twin = *family.find("via-a");
    twin.id = "aaa";
    family.configurations.push_back(twin);
    CHECK(select(family, ctx)->config->id == "aaa");
  }

  SUBCASE("excluded ids are skipped") {
    CHECK(select(spec.family(), ctx, {"via-a"})->config->id == "via-b");
    CHECK_FALSE(select(spec.family(), ctx, {"via-a", "via-b"}));
  }

  SUBCASE("score of an invalid configuration throws") {
    ctx.hosts.at("S1").alive = false;
    try {
      score(*spec.family().find("via-a"), ctx);
      FAIL("expected InvalidConfiguration");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidConfiguration);
    }
  }
}

TEST_CASE("selection edge cases") {
  auto spec = spec_from(kPartitioned);
  auto ctx = testsupport::initial_context(spec);
  ConfigurationFamily single{"p", "F1", {*spec.family().find("near")}};
  CHECK(select(single, ctx)->config->id == "near");

  ConfigurationFamily none{"p", "F1", {*spec.family().find("far")}};
  CHECK_FALSE(select(none, ctx));
  auto ranking = rank_configurations(none, ctx);
  REQUIRE(ranking.size() == 1);
  CHECK_FALSE(ranking[0].valid);
  CHECK_FALSE(ranking[0].violations.empty());

  ctx.hosts.at("F1").alive = false;
  CHECK_FALSE(select(spec.family(), ctx));
}

TEST_CASE("telesurveillance selection matches a brute-force oracle") {
  auto spec = telesurveillance();
  const auto& family = spec.family();
  for (Tick t : {Tick{0}, Tick{60}}) {
    auto ctx = context_at(spec, t);
    // Oracle: highest qos level among configurations some assignment satisfies.
    int best_level = -1;
    std::vector<std::string> at_best;
    for (const auto& c : family.configurations) {
      if (!testsupport::exhaustive_valid(c, ctx)) continue;
      if (c.qos_level > best_level) {
        best_level = c.qos_level;
        at_best.clear();
      }
      if (c.qos_level == best_level) at_best.push_back(c.id);
    }
    auto chosen = select(family, ctx);
    REQUIRE(chosen);
    CHECK(at_best.size() == 1);
    CHECK(chosen->config->id == at_best.front());
    if (t == 0) CHECK(chosen->config->id == "all-infrared");
    if (t == 60) {
      CHECK(chosen->config->id == "infrared-S2-S3+camera");
      CHECK(chosen->binding.node_hosts.at("camera-detect") == "S4");
    }
  }
}

TEST_CASE("reconfiguration scripts") {
  BoundConfiguration current{"old",
                             {bn("src", "F1"), bn("dst", "F2")},
                             {be(bn("src", "F1"), bn("dst", "F2"))}};

  SUBCASE("from nothing everything is created") {
    auto s = diff_bound(nullptr, current);
    CHECK(s.destroy_conduits.empty());
    CHECK(s.destroy_containers.empty());
    CHECK(s.create_containers.size() == 2);
    CHECK(s.create_conduits.size() == 1);
    CHECK(s.target_id == "old");
  }

  SUBCASE("same deployment yields an empty script") { CHECK(diff_bound(&current, current).empty()); }

  SUBCASE("moving one node replaces it and its conduits") {
    BoundConfiguration next{"new", {bn("src", "F1"), bn("dst", "F3")}, {be(bn("src", "F1"), bn("dst", "F3"))}};
    auto s = diff_bound(&current, next);
    CHECK(s.destroy_conduits == std::vector<BoundEdge>{be(bn("src", "F1"), bn("dst", "F2"))});
    CHECK(s.destroy_containers == std::vector<BoundNode>{bn("dst", "F2")});
    CHECK(s.create_containers == std::vector<BoundNode>{bn("dst", "F3")});
    CHECK(s.create_conduits == std::vector<BoundEdge>{be(bn("src", "F1"), bn("dst", "F3"))});
  }

  SUBCASE("changing only the policy replaces only the conduit") {
    BoundConfiguration next = current;
    next.edges[0].policy = core::TransportPolicy::realtime_drop;
    auto s = diff_bound(&current, next);
    CHECK(s.destroy_conduits.size() == 1);
    CHECK(s.create_conduits.size() == 1);
    CHECK(s.destroy_containers.empty());
    CHECK(s.create_containers.empty());
  }

  SUBCASE("binding through a configuration graph") {
    auto spec = spec_from(kPartitioned);
    Binding b{{{"a", "F1"}, {"b", "F2"}}, {}};
    auto bound = bind(*spec.family().find("near"), b);
    CHECK(bound.nodes.size() == 2);
    REQUIRE(bound.edges.size() == 1);
    CHECK(bound.edges[0].flows == std::vector<FlowId>{"v"});
    CHECK(diff_config(&bound, *spec.family().find("near"), b).empty());
    try {
      bind(*spec.family().find("near"), Binding{{{"a", "F1"}}, {}});
      FAIL("expected UnboundNode");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnboundNode);
    }
  }
}

TEST_CASE("property: validity agrees with exhaustive search") {
  std::mt19937_64 rng(7);
  int valid = 0, invalid = 0;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    auto spec = testsupport::random_scenario(seed);
    auto ctx = context_at(spec, static_cast<Tick>(rng() % 90));
    squeeze(ctx, rng);
    for (const auto& c : spec.family().configurations) {
      auto v = is_valid(c, ctx);
      CAPTURE(seed);
      CAPTURE(c.id);
      CHECK(v.valid == testsupport::exhaustive_valid(c, ctx));
      if (v.valid) {
        ++valid;
        CHECK(check_binding(c, *v.binding, ctx).empty());
      } else {
        ++invalid;
        CHECK_FALSE(v.violations.empty());
      }
    }
  }
  CHECK(valid > 20);
  CHECK(invalid > 20);
}

TEST_CASE("property: selection is the best valid configuration") {
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 200; seed < 260; ++seed) {
    auto spec = testsupport::random_scenario(seed);
    auto ctx = context_at(spec, static_cast<Tick>(rng() % 90));
    squeeze(ctx, rng);
    const auto& family = spec.family();
    auto chosen = select(family, ctx);
    auto ranking = rank_configurations(family, ctx);
    REQUIRE(ranking.size() == family.configurations.size());
    CAPTURE(seed);

    const RankedConfiguration* best = nullptr;
    for (const auto& r : ranking)
      if (r.valid && (!best || better(*r.score, *best->score))) best = &r;
    CHECK(bool(chosen) == bool(best));
    if (!chosen) continue;
    CHECK(chosen->config->id == best->id);
    CHECK(ranking.front().id == best->id);
    CHECK(testsupport::exhaustive_valid(*chosen->config, ctx));
    for (const auto& c : family.configurations)
      if (c.qos_level > chosen->score.qos_level) CHECK_FALSE(testsupport::exhaustive_valid(c, ctx));

    // Valid entries come first in score order, then invalid ones by id.
    bool seen_invalid = false;
    for (std::size_t i = 0; i < ranking.size(); ++i) {
      if (!ranking[i].valid) seen_invalid = true;
      else CHECK_FALSE(seen_invalid);
      if (i > 0 && ranking[i].valid && ranking[i - 1].valid) CHECK(better(*ranking[i - 1].score, *ranking[i].score));
      if (i > 0 && !ranking[i].valid && !ranking[i - 1].valid) CHECK(ranking[i - 1].id < ranking[i].id);
    }
  }
}

TEST_CASE("property: score order is a strict total order") {
  std::mt19937_64 rng(3);
  auto draw = [&] {
    return Score{static_cast<int>(rng() % 3), static_cast<double>(rng() % 3), static_cast<int>(rng() % 3),
                 std::string(1, static_cast<char>('a' + rng() % 4))};
  };
  for (int i = 0; i < 3000; ++i) {
    auto a = draw(), b = draw(), c = draw();
    CHECK_FALSE(better(a, a));
    if (a == b) continue;
    if (a.id != b.id) CHECK(better(a, b) != better(b, a));
    CHECK_FALSE((better(a, b) && better(b, a)));
    if (better(a, b) && better(b, c)) CHECK(better(a, c));
    if (strictly_better_ignoring_id(a, b)) CHECK(better(a, b));
  }
}

TEST_CASE("property: applying a script reaches the target deployment") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    auto from = random_bound(rng);
    auto to = random_bound(rng);
    CHECK(diff_bound(&from, from).empty());
    auto script = diff_bound(&from, to);
    CHECK(isomorphic(apply_script(from, script), to));
    CHECK(isomorphic(apply_script(BoundConfiguration{}, diff_bound(nullptr, to)), to));
    // Untouched components appear in neither half of the script.
    for (const auto& n : script.create_containers)
      CHECK(std::find(from.nodes.begin(), from.nodes.end(), n) == from.nodes.end());
    for (const auto& n : script.destroy_containers)
      CHECK(std::find(to.nodes.begin(), to.nodes.end(), n) == to.nodes.end());
  }
}

TEST_CASE("property: more memory, capabilities or packages never invalidate a configuration") {
  std::mt19937_64 rng(13);
  int checked = 0;
  for (std::uint64_t seed = 300; seed < 360; ++seed) {
    auto spec = testsupport::random_scenario(seed);
    auto ctx = context_at(spec, static_cast<Tick>(rng() % 60));
    squeeze(ctx, rng);
    std::vector<HostId> ids;
    for (const auto& [id, h] : ctx.hosts) ids.push_back(id);
    std::vector<std::string> cms;
    for (const auto& [id, d] : ctx.repository.all()) cms.push_back(id);

    for (const auto& c : spec.family().configurations) {
      if (!is_valid(c, ctx).valid) continue;
      for (int k = 0; k < 5; ++k) {
        auto richer = ctx;
        auto& h = richer.hosts.at(ids[rng() % ids.size()]);
        switch (rng() % 3) {
          case 0: h.memory_capacity += static_cast<double>(1 + rng() % 20); break;
          case 1: h.capabilities.insert(rng() % 2 ? "infrared" : "camera"); break;
          default: h.preloaded_repository.insert(cms[rng() % cms.size()]); break;
        }
        CAPTURE(seed);
        CHECK(is_valid(c, richer).valid);
        ++checked;
      }
    }
  }
  CHECK(checked > 100);
}
