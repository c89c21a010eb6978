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

#include "hetadapt/common/log.hpp"

#include <json.hpp>
#include <ostream>

#include "hetadapt/common/error.hpp"

namespace hetadapt {

using ordered_json = nlohmann::ordered_json;

std::string to_json_line(const LogRecord& r) {
  ordered_json j;
  j["tick"] = r.tick;
  j["seq"] = r.seq;
  j["kind"] = r.kind;
  j["host"] = r.host;
  auto details = ordered_json::object();
  for (const auto& [k, v] : r.details) std::visit([&](const auto& x) { details[k] = x; }, v);
  j["details"] = std::move(details);
  return j.dump();
}

LogRecord parse_log_line(const std::string& line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedLog, e.what());
  }
  auto require = [&](const char* key) -> const ordered_json& {
    if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::MalformedLog, std::string("missing '") + key + "'");
    return j[key];
  };
  LogRecord r;
  try {
    r.tick = require("tick").get<Tick>();
    r.seq = require("seq").get<std::uint64_t>();
    r.kind = require("kind").get<std::string>();
    r.host = require("host").get<std::string>();
    const auto& details = require("details");
    if (!details.is_object()) throw Error(ErrorCode::MalformedLog, "details is not an object");
    for (const auto& [k, v] : details.items()) {
      if (v.is_boolean()) r.details[k] = v.get<bool>();
      else if (v.is_number_integer()) r.details[k] = v.get<std::int64_t>();
      else if (v.is_number()) r.details[k] = v.get<double>();
      else if (v.is_string()) r.details[k] = v.get<std::string>();
      else throw Error(ErrorCode::MalformedLog, "detail '" + k + "' is not a scalar");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedLog, e.what());
  }
  return r;
}

const LogRecord& EventLog::append(Tick tick, std::string kind, HostId host, Details details) {
  records_.push_back({tick, next_seq_++, std::move(kind), std::move(host), std::move(details)});
  for (const auto& o : observers_) o(records_.back());
  return records_.back();
}

void EventLog::flush() {
  if (sink_) {
    for (std::size_t i = flushed_; i < records_.size(); ++i) *sink_ << to_json_line(records_[i]) << '\n';
    sink_->flush();
  }
  if (retain_) {
    flushed_ = records_.size();
  } else {
    records_.clear();
    flushed_ = 0;
  }
}

std::int64_t as_int(const LogValue& v) {
  if (auto p = std::get_if<std::int64_t>(&v)) return *p;
  if (auto p = std::get_if<double>(&v)) return static_cast<std::int64_t>(*p);
  if (auto p = std::get_if<bool>(&v)) return *p ? 1 : 0;
  throw Error(ErrorCode::MalformedLog, "expected a number, got '" + std::get<std::string>(v) + "'");
}

double as_double(const LogValue& v) {
  if (auto p = std::get_if<double>(&v)) return *p;
  if (auto p = std::get_if<std::int64_t>(&v)) return static_cast<double>(*p);
  if (auto p = std::get_if<bool>(&v)) return *p ? 1.0 : 0.0;
  throw Error(ErrorCode::MalformedLog, "expected a number, got '" + std::get<std::string>(v) + "'");
}

std::string as_string(const LogValue& v) {
  if (auto p = std::get_if<std::string>(&v)) return *p;
  if (auto p = std::get_if<std::int64_t>(&v)) return std::to_string(*p);
  if (auto p = std::get_if<bool>(&v)) return *p ? "true" : "false";
  return nlohmann::json(std::get<double>(v)).dump();
}

}  // namespace hetadapt
