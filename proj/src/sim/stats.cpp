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

#include "hetadapt/sim/stats.hpp"

#include <json.hpp>
#include <optional>
#include <set>

#include "hetadapt/common/error.hpp"

namespace hetadapt::sim {

namespace {

const std::set<std::string> kTimelineKinds = {"scenario_event",     "host_died",        "reconfiguration_complete",
                                              "reconfiguration_failed", "degraded",     "migration_complete",
                                              "migration_failed",   "unsupervised"};

const LogValue* get(const LogRecord& r, const char* key) {
  auto it = r.details.find(key);
  return it == r.details.end() ? nullptr : &it->second;
}

std::string summarize(const LogRecord& r) {
  std::string out;
  for (const auto& [key, value] : r.details) {
    if (!out.empty()) out += ' ';
    out += key + "=" + as_string(value);
  }
  return out;
}

class Accumulator {
 public:
  void add(const LogRecord& r, std::size_t line) {
    auto where = "line " + std::to_string(line) + ": ";
    if (previous_ && r.tick < previous_->first)
      throw Error(ErrorCode::MalformedLog, where + "tick goes backwards");
    if (previous_ && r.seq <= previous_->second)
      throw Error(ErrorCode::MalformedLog, where + "sequence number not increasing");
    previous_ = {r.tick, r.seq};
    try {
      apply(r);
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedLog, where + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::MalformedLog, where + "bad details for " + r.kind);
    }
  }

  LogStats result() && { return std::move(stats_); }

 private:
  void apply(const LogRecord& r) {
    ++stats_.records;
    stats_.last_tick = r.tick;
    if (r.kind == "energy") {
      auto& e = stats_.energy[r.host];
      e.tx += as_double(*require(r, "tx"));
      e.rx += as_double(*require(r, "rx"));
      e.cpu += as_double(*require(r, "cpu"));
      e.drained += as_double(*require(r, "drained"));
    } else if (r.kind == "frame_delivered") {
      ++stats_.frames_delivered;
    } else if (r.kind == "frame_dropped") {
      auto count = static_cast<std::uint64_t>(as_int(*require(r, "count")));
      stats_.frames_dropped += count;
      stats_.dropped_by_reason[as_string(*require(r, "reason"))] += count;
    } else if (r.kind == "reconfiguration_complete") {
      if (as_string(*require(r, "origin")) != "initial") {
        ++stats_.reconfigurations;
        ++stats_.latency_histogram[r.tick - as_int(*require(r, "trigger_tick"))];
      }
    } else if (r.kind == "reconfiguration_failed") {
      ++stats_.failures;
    } else if (r.kind == "migration_complete") {
      ++stats_.migrations;
    }
    if (kTimelineKinds.contains(r.kind)) stats_.timeline.push_back({r.tick, r.kind, r.host, summarize(r)});
  }

  static const LogValue* require(const LogRecord& r, const char* key) {
    const auto* v = get(r, key);
    if (!v) throw Error(ErrorCode::MalformedLog, r.kind + " without '" + key + "'");
    return v;
  }

  LogStats stats_;
  std::optional<std::pair<Tick, std::uint64_t>> previous_;
};

}  // namespace

LogStats compute_stats(std::istream& in) {
  Accumulator acc;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    LogRecord r;
    try {
      r = parse_log_line(line);
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedLog, "line " + std::to_string(number) + ": " + e.what());
    }
    acc.add(r, number);
  }
  return std::move(acc).result();
}

LogStats compute_stats(const std::vector<LogRecord>& records) {
  Accumulator acc;
  for (std::size_t i = 0; i < records.size(); ++i) acc.add(records[i], i + 1);
  return std::move(acc).result();
}

std::string render_stats(const LogStats& s) {
  nlohmann::ordered_json j;
  j["records"] = s.records;
  j["last_tick"] = s.last_tick;
  auto energy = nlohmann::ordered_json::object();
  for (const auto& [host, e] : s.energy)
    energy[host] = {{"tx", e.tx}, {"rx", e.rx}, {"cpu", e.cpu}, {"drained", e.drained}, {"total", e.total()}};
  j["energy"] = std::move(energy);
  auto histogram = nlohmann::ordered_json::object();
  for (const auto& [latency, count] : s.latency_histogram) histogram[std::to_string(latency)] = count;
  j["latency_histogram"] = std::move(histogram);
  j["frames"] = {{"delivered", s.frames_delivered}, {"dropped", s.frames_dropped}, {"dropped_by_reason", s.dropped_by_reason}};
  j["reconfigurations"] = s.reconfigurations;
  j["failures"] = s.failures;
  j["migrations"] = s.migrations;
  auto timeline = nlohmann::ordered_json::array();
  for (const auto& t : s.timeline)
    timeline.push_back({{"tick", t.tick}, {"kind", t.kind}, {"host", t.host}, {"summary", t.summary}});
  j["timeline"] = std::move(timeline);
  return j.dump(2) + "\n";
}

}  // namespace hetadapt::sim
