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

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "hetadapt/common/log.hpp"
#include "hetadapt/net/host.hpp"

namespace hetadapt::sim {

struct TimelineEntry {
  Tick tick = 0;
  std::string kind;
  HostId host;
  std::string summary;
};

struct LogStats {
  std::uint64_t records = 0;
  Tick last_tick = 0;
  std::map<HostId, net::EnergyAccount> energy;
  /// Ticks from trigger to completion of each non-initial reconfiguration.
  std::map<Tick, std::uint64_t> latency_histogram;
  std::uint64_t frames_delivered = 0;
  std::uint64_t frames_dropped = 0;
  std::map<std::string, std::uint64_t> dropped_by_reason;
  int reconfigurations = 0;
  int failures = 0;
  int migrations = 0;
  std::vector<TimelineEntry> timeline;
};

/// Reads a JSON-lines log. Throws MalformedLog naming the offending line.
LogStats compute_stats(std::istream& in);
LogStats compute_stats(const std::vector<LogRecord>& records);

std::string render_stats(const LogStats& stats);

}  // namespace hetadapt::sim
