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

#include "hetadapt/net/host.hpp"

#include <cmath>

#include "hetadapt/common/error.hpp"
#include "hetadapt/net/footprint.hpp"

namespace hetadapt::net {

std::string_view to_string(HostClass cls) {
  switch (cls) {
    case HostClass::fixed: return "fixed";
    case HostClass::light: return "light";
    case HostClass::sensor: return "sensor";
  }
  return "fixed";
}

HostClass host_class_from_string(std::string_view text) {
  if (text == "fixed") return HostClass::fixed;
  if (text == "light") return HostClass::light;
  if (text == "sensor") return HostClass::sensor;
  throw Error(ErrorCode::InvalidValue, "unknown host class '" + std::string(text) + "'");
}

double distance(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double Host::battery() const {
  if (is_fixed()) return std::numeric_limits<double>::infinity();
  return battery_initial + recharged - energy.total();
}

void charge_energy(Host& host, EnergyKind kind, double amount) {
  if (amount < 0) throw Error(ErrorCode::InvalidValue, "negative energy charge");
  if (host.is_fixed() || amount == 0) return;
  switch (kind) {
    case EnergyKind::tx: host.energy.tx += amount; break;
    case EnergyKind::rx: host.energy.rx += amount; break;
    case EnergyKind::cpu: host.energy.cpu += amount; break;
    case EnergyKind::drained: host.energy.drained += amount; break;
  }
}

std::string_view to_string(Fragment fragment) {
  switch (fragment) {
    case Fragment::CM: return "CM";
    case Fragment::UE: return "UE";
    case Fragment::US: return "US";
    case Fragment::UC_full: return "UC_full";
    case Fragment::UC_stub: return "UC_stub";
    case Fragment::UC_logic: return "UC_logic";
    case Fragment::ENDPOINT_IN: return "ENDPOINT_IN";
    case Fragment::ENDPOINT_OUT: return "ENDPOINT_OUT";
    case Fragment::CONDUIT_UC: return "CONDUIT_UC";
  }
  return "CM";
}

Fragment fragment_from_string(std::string_view text) {
  for (auto f : {Fragment::CM, Fragment::UE, Fragment::US, Fragment::UC_full, Fragment::UC_stub,
                 Fragment::UC_logic, Fragment::ENDPOINT_IN, Fragment::ENDPOINT_OUT,
                 Fragment::CONDUIT_UC}) {
    if (to_string(f) == text) return f;
  }
  throw Error(ErrorCode::InvalidValue, "unknown fragment '" + std::string(text) + "'");
}

double Footprints::of(Fragment fragment, double cm_footprint) const {
  switch (fragment) {
    case Fragment::CM: return cm_footprint;
    case Fragment::UE: return ue;
    case Fragment::US: return us;
    case Fragment::UC_full: return uc_full;
    case Fragment::UC_stub: return uc_stub;
    case Fragment::UC_logic: return uc_logic;
    case Fragment::ENDPOINT_IN:
    case Fragment::ENDPOINT_OUT: return endpoint;
    case Fragment::CONDUIT_UC: return conduit_uc;
  }
  return 0;
}

bool check_capacity(const Host& host, std::span<const FragmentDemand> fragments,
                    const Footprints& footprints) {
  double demand = 0;
  for (const auto& f : fragments) demand += footprints.of(f.fragment, f.cm_footprint);
  return host.memory_used + demand <= host.memory_capacity;
}

}  // namespace hetadapt::net
