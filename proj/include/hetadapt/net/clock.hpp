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
#include <map>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "hetadapt/common/types.hpp"

namespace hetadapt::net {

/// Total order for pending events: (tick, priority first, source, sequence).
/// The sequence number is unique per queue, so no two keys compare equal.
struct EventKey {
  Tick tick = 0;
  Priority priority = Priority::normal;
  HostId source;
  std::uint64_t sequence = 0;

  friend bool operator<(const EventKey& a, const EventKey& b) {
    // Priority events sort ahead of normal ones in the same tick.
    return std::make_tuple(a.tick, -static_cast<int>(a.priority), std::cref(a.source), a.sequence) <
           std::make_tuple(b.tick, -static_cast<int>(b.priority), std::cref(b.source), b.sequence);
  }
};

template <class T>
class EventQueue {
 public:
  void push(Tick tick, Priority priority, HostId source, T value) {
    queue_.emplace(EventKey{tick, priority, std::move(source), next_sequence_++}, std::move(value));
  }

  /// Removes and returns every event scheduled at or before `tick`, in key order.
  std::vector<T> pop_due(Tick tick) {
    std::vector<T> due;
    auto it = queue_.begin();
    while (it != queue_.end() && it->first.tick <= tick) {
      due.push_back(std::move(it->second));
      it = queue_.erase(it);
    }
    return due;
  }

  /// Removes the first event due at or before `tick`, if any.
  std::optional<T> pop_next(Tick tick) {
    auto it = queue_.begin();
    if (it == queue_.end() || it->first.tick > tick) return std::nullopt;
    T value = std::move(it->second);
    queue_.erase(it);
    return value;
  }

  template <class Pred>
  std::vector<T> extract_if(Pred pred) {
    std::vector<T> out;
    for (auto it = queue_.begin(); it != queue_.end();) {
      if (pred(it->second)) {
        out.push_back(std::move(it->second));
        it = queue_.erase(it);
      } else {
        ++it;
      }
    }
    return out;
  }

  template <class Pred>
  std::size_t count_if(Pred pred) const {
    std::size_t n = 0;
    for (const auto& [key, value] : queue_) n += pred(value) ? 1 : 0;
    return n;
  }

  bool empty() const { return queue_.empty(); }
  std::size_t size() const { return queue_.size(); }

 private:
  std::map<EventKey, T> queue_;
  std::uint64_t next_sequence_ = 0;
};

template <class T>
struct SimClock {
  Tick tick = 0;
  EventQueue<T> pending;
};

}  // namespace hetadapt::net
