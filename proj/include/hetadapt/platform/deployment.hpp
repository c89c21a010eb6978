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

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hetadapt/net/footprint.hpp"
#include "hetadapt/net/host.hpp"
#include "hetadapt/routing/routing.hpp"

namespace hetadapt::platform {

/// Which end of a conduit a fragment belongs to. PE fragments use `none`.
enum class Side { none, in, out };
std::string_view to_string(Side side);
Side side_from_string(std::string_view text);

struct Placement {
  net::Fragment fragment;
  Side side = Side::none;
  HostId host;

  friend bool operator==(const Placement&, const Placement&) = default;
};

struct DeploymentPlan {
  std::string subject;
  std::vector<Placement> placements;

  /// Host holding `fragment` (on `side`), if placed.
  std::optional<HostId> host_of(net::Fragment fragment, Side side = Side::none) const;
  friend bool operator==(const DeploymentPlan&, const DeploymentPlan&) = default;
};

/// Host class plus the correspondent that takes deported fragments
/// (required for light hosts, ignored otherwise).
struct HostSlot {
  HostId host;
  net::HostClass cls = net::HostClass::fixed;
  std::optional<HostId> correspondent;
};

/// Fixed: CM, UE, US, UC_full on the host. Light: CM, UE, US, UC_stub on the
/// host and UC_logic on the correspondent. Sensor: everything local.
/// Throws NoCorrespondent for a light host without correspondent.
DeploymentPlan plan_pe_deployment(const std::string& subject, const HostSlot& slot);

/// Each end of the conduit is planned for its own host: the endpoint plus a
/// CONDUIT_UC share, or endpoint plus UC_stub with the share on the
/// correspondent when the end sits on a light host.
DeploymentPlan plan_conduit_deployment(const std::string& subject, const HostSlot& source,
                                       const HostSlot& target);

/// Memory demand per host for a plan. CM fragments take `cm_footprint`.
std::map<HostId, std::vector<net::FragmentDemand>> demands_by_host(const DeploymentPlan& plan,
                                                                   double cm_footprint = 0);
std::map<HostId, double> memory_by_host(const DeploymentPlan& plan, const net::Footprints& footprints,
                                        double cm_footprint = 0);

/// Nearest reachable alive fixed host as seen from `light`'s route table;
/// ties go to the lowest host id. Throws NoCorrespondent.
HostId assign_correspondent(const HostId& light, const std::map<HostId, net::Host>& hosts,
                            const routing::RouteTable& light_table);

std::optional<HostId> find_correspondent(const HostId& light, const std::map<HostId, net::Host>& hosts,
                                         const routing::RouteTable& light_table);

}  // namespace hetadapt::platform
