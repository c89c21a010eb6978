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

#include <limits>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "hetadapt/common/types.hpp"

namespace hetadapt::net {

enum class HostClass { fixed, light, sensor };

std::string_view to_string(HostClass cls);
HostClass host_class_from_string(std::string_view text);

struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

double distance(const Position& a, const Position& b);

enum class EnergyKind { tx, rx, cpu, drained };

/// Per-host consumption counters. All counters only grow.
struct EnergyAccount {
  double tx = 0.0;
  double rx = 0.0;
  double cpu = 0.0;
  double drained = 0.0;

  double total() const { return tx + rx + cpu + drained; }
  friend bool operator==(const EnergyAccount&, const EnergyAccount&) = default;
};

/// First-order radio model: E_tx = alpha + beta * bytes, E_rx = gamma * bytes.
struct EnergyParams {
  double alpha = 50.0;
  double beta = 1.0;
  double gamma = 0.5;

  double tx_cost(double bytes) const { return alpha + beta * bytes; }
  double rx_cost(double bytes) const { return gamma * bytes; }
  friend bool operator==(const EnergyParams&, const EnergyParams&) = default;
};

inline constexpr double kUnboundedMemory = 1e12;

struct Host {
  HostId id;
  HostClass cls = HostClass::fixed;
  Position position;
  double radio_range = 0.0;
  double memory_capacity = kUnboundedMemory;
  double memory_used = 0.0;
  double battery_initial = std::numeric_limits<double>::infinity();
  double recharged = 0.0;
  std::set<std::string> capabilities;
  std::set<std::string> preloaded_repository;
  bool alive = true;
  EnergyAccount energy;

  bool wireless() const { return radio_range > 0.0; }
  bool is_fixed() const { return cls == HostClass::fixed; }
  double battery() const;
  double free_memory() const { return memory_capacity - memory_used; }
  friend bool operator==(const Host&, const Host&) = default;
};

/// Adds `amount` to the ledger counter of `kind`. Fixed hosts are never charged.
void charge_energy(Host& host, EnergyKind kind, double amount);

}  // namespace hetadapt::net
