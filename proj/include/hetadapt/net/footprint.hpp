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

#include <span>
#include <string_view>

#include "hetadapt/net/host.hpp"

namespace hetadapt::net {

/// Pieces a PE or a Conduit is split into when deployed.
enum class Fragment {
  CM,
  UE,
  US,
  UC_full,
  UC_stub,
  UC_logic,
  ENDPOINT_IN,
  ENDPOINT_OUT,
  CONDUIT_UC,
};

std::string_view to_string(Fragment fragment);
Fragment fragment_from_string(std::string_view text);

/// Memory units charged per fragment. CM fragments use the descriptor footprint.
struct Footprints {
  double ue = 1;
  double us = 1;
  double uc_stub = 1;
  double uc_full = 3;
  double uc_logic = 2;
  double endpoint = 1;
  double conduit_uc = 2;

  double of(Fragment fragment, double cm_footprint = 0) const;
  friend bool operator==(const Footprints&, const Footprints&) = default;
};

struct FragmentDemand {
  Fragment fragment;
  double cm_footprint = 0;
};

/// True iff the host can take every fragment on top of what it already holds.
bool check_capacity(const Host& host, std::span<const FragmentDemand> fragments,
                    const Footprints& footprints);

}  // namespace hetadapt::net
