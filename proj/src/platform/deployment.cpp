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

#include "hetadapt/platform/deployment.hpp"

#include "hetadapt/common/error.hpp"

namespace hetadapt::platform {

using net::Fragment;
using net::HostClass;

std::string_view to_string(Side side) {
  switch (side) {
    case Side::none: return "none";
    case Side::in: return "in";
    case Side::out: return "out";
  }
  return "none";
}

Side side_from_string(std::string_view text) {
  if (text == "none") return Side::none;
  if (text == "in") return Side::in;
  if (text == "out") return Side::out;
  throw Error(ErrorCode::InvalidValue, "unknown side '" + std::string(text) + "'");
}

std::optional<HostId> DeploymentPlan::host_of(Fragment fragment, Side side) const {
  for (const auto& p : placements)
    if (p.fragment == fragment && p.side == side) return p.host;
  return std::nullopt;
}

namespace {

const HostId& require_correspondent(const std::string& subject, const HostSlot& slot) {
  if (!slot.correspondent)
    throw Error(ErrorCode::NoCorrespondent, "light host '" + slot.host + "' (for '" + subject + "')");
  return *slot.correspondent;
}

void plan_end(const std::string& subject, const HostSlot& slot, Side side, DeploymentPlan& plan) {
  Fragment endpoint = side == Side::in ? Fragment::ENDPOINT_IN : Fragment::ENDPOINT_OUT;
  plan.placements.push_back({endpoint, side, slot.host});
  if (slot.cls == HostClass::light) {
    plan.placements.push_back({Fragment::UC_stub, side, slot.host});
    plan.placements.push_back({Fragment::CONDUIT_UC, side, require_correspondent(subject, slot)});
  } else {
    plan.placements.push_back({Fragment::CONDUIT_UC, side, slot.host});
  }
}

}  // namespace

DeploymentPlan plan_pe_deployment(const std::string& subject, const HostSlot& slot) {
  DeploymentPlan plan{subject, {}};
  for (auto f : {Fragment::CM, Fragment::UE, Fragment::US}) plan.placements.push_back({f, Side::none, slot.host});
  if (slot.cls == HostClass::light) {
    const auto& corr = require_correspondent(subject, slot);
    plan.placements.push_back({Fragment::UC_stub, Side::none, slot.host});
    plan.placements.push_back({Fragment::UC_logic, Side::none, corr});
  } else {
    plan.placements.push_back({Fragment::UC_full, Side::none, slot.host});
  }
  return plan;
}

DeploymentPlan plan_conduit_deployment(const std::string& subject, const HostSlot& source,
                                       const HostSlot& target) {
  DeploymentPlan plan{subject, {}};
  // The conduit's input port sits with the source PE, its output port with the target.
  plan_end(subject, source, Side::in, plan);
  plan_end(subject, target, Side::out, plan);
  return plan;
}

std::map<HostId, std::vector<net::FragmentDemand>> demands_by_host(const DeploymentPlan& plan,
                                                                   double cm_footprint) {
  std::map<HostId, std::vector<net::FragmentDemand>> out;
  for (const auto& p : plan.placements)
    out[p.host].push_back({p.fragment, p.fragment == Fragment::CM ? cm_footprint : 0});
  return out;
}

std::map<HostId, double> memory_by_host(const DeploymentPlan& plan, const net::Footprints& footprints,
                                        double cm_footprint) {
  std::map<HostId, double> out;
  for (const auto& p : plan.placements) out[p.host] += footprints.of(p.fragment, cm_footprint);
  return out;
}

std::optional<HostId> find_correspondent(const HostId& light, const std::map<HostId, net::Host>& hosts,
                                         const routing::RouteTable& light_table) {
  auto self = hosts.find(light);
  if (self == hosts.end() || !self->second.alive) return std::nullopt;
  std::optional<HostId> best;
  int best_hops = 0;
  for (const auto& [id, host] : hosts) {
    if (!host.is_fixed() || !host.alive) continue;
    auto entry = light_table.lookup(id);
    if (!entry) continue;
    if (!best || entry->hop_count < best_hops) {
      best = id;
      best_hops = entry->hop_count;
    }
  }
  return best;
}

HostId assign_correspondent(const HostId& light, const std::map<HostId, net::Host>& hosts,
                            const routing::RouteTable& light_table) {
  auto corr = find_correspondent(light, hosts, light_table);
  if (!corr) throw Error(ErrorCode::NoCorrespondent, "no fixed host reachable from '" + light + "'");
  return *corr;
}

}  // namespace hetadapt::platform
