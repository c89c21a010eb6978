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
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "hetadapt/common/types.hpp"

namespace hetadapt {

using LogValue = std::variant<bool, std::int64_t, double, std::string>;
using Details = std::map<std::string, LogValue>;

struct LogRecord {
  Tick tick = 0;
  std::uint64_t seq = 0;
  std::string kind;
  HostId host;
  Details details;

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

std::string to_json_line(const LogRecord& record);
LogRecord parse_log_line(const std::string& line);

/// Append-only record sequence. Records go to the sink (one JSON object per
/// line) when flush() is called; the driver flushes once per tick.
class EventLog {
 public:
  const LogRecord& append(Tick tick, std::string kind, HostId host, Details details = {});

  void set_sink(std::ostream* sink) { sink_ = sink; }
  void flush();

  /// Records kept in memory; when retention is off only unflushed ones are.
  const std::vector<LogRecord>& records() const { return records_; }
  void set_retain(bool retain) { retain_ = retain; }
  std::uint64_t size() const { return next_seq_; }

  using Observer = std::function<void(const LogRecord&)>;
  void add_observer(Observer observer) { observers_.push_back(std::move(observer)); }

 private:
  std::vector<LogRecord> records_;
  std::size_t flushed_ = 0;
  std::ostream* sink_ = nullptr;
  bool retain_ = true;
  std::uint64_t next_seq_ = 0;
  std::vector<Observer> observers_;
};

std::int64_t as_int(const LogValue& v);
double as_double(const LogValue& v);
std::string as_string(const LogValue& v);

}  // namespace hetadapt
