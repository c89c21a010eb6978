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

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hetadapt/platform/factories.hpp"
#include "hetadapt/platform/world.hpp"
#include "hetadapt/qos/config.hpp"
#include "hetadapt/qos/script.hpp"

namespace hetadapt::platform {

enum class Trigger { initial, alert, info, fallback, retry };
std::string_view to_string(Trigger trigger);

/// One run of the selection, reported to observers.
struct Decision {
  Tick tick = 0;
  Trigger trigger = Trigger::initial;
  qos::ContextSnapshot context;
  std::set<std::string> excluded;
  std::optional<std::string> chosen;
};

struct CurrentConfiguration {
  std::string id;
  qos::Binding binding;
  qos::BoundConfiguration bound;
};

/// Supervision, Container/Conduit Factories and the control-unit relays.
/// Supervision runs on one fixed host per application and receives every
/// route notice; factories run on every fixed host and on sensors; a light
/// host's components are built by its correspondent.
class Platform {
 public:
  Platform(World& world, qos::ConfigurationFamily family);

  /// Phase 2: routing tick on every live host; in-use route changes are
  /// sent to Supervision as ROUTE_ALERT (lost) or ROUTE_INFO (changed).
  void routing_phase();

  /// Phase 3: initial selection, message handling (priority first),
  /// periodic control-unit reports, timeouts, deferred notices, retries.
  void platform_phase();

  const qos::ConfigurationFamily& family() const { return family_; }
  const HostId& supervisor() const { return family_.supervisor; }
  const std::optional<CurrentConfiguration>& current() const { return current_; }
  int reconfigurations() const { return reconfigurations_; }
  bool degraded() const { return degraded_; }
  bool executing() const { return exec_.has_value(); }
  const std::set<HostId>& unsupervised() const { return unsupervised_; }

  using DecisionObserver = std::function<void(const Decision&)>;
  void add_decision_observer(DecisionObserver observer) { observers_.push_back(std::move(observer)); }

  /// Recomputes every host's in-use destinations from the deployment.
  void refresh_in_use();

 private:
  struct Request {
    MessageKind kind = MessageKind::COMMAND;
    qos::BoundNode node;
    qos::BoundEdge edge;
    std::string subject;
  };

  struct Execution {
    bool migration = false;
    std::string target_id;
    qos::Binding binding;
    qos::BoundConfiguration bound;
    Trigger trigger = Trigger::initial;
    /// Trigger of the first decision in a fallback chain.
    Trigger origin = Trigger::initial;
    Tick trigger_tick = 0;
    Tick started = 0;
    std::set<std::string> excluded;
    std::vector<std::vector<Request>> batches;
    std::size_t batch = 0;
    std::map<std::uint64_t, Request> outstanding;
    Tick deadline = 0;
    std::vector<std::string> created;
    HostId light;
    HostId from;
    HostId to;
    std::size_t fragments = 0;
  };

  struct Notice {
    Trigger kind;
    Tick raised;
  };

  void process_inbox();
  void dispatch(const Envelope& message);
  void on_factory_request(const Envelope& message);
  void on_command(const Envelope& message);
  void on_migrate(const Envelope& message);
  void on_ack(const Envelope& message);
  void on_notice(const Envelope& message);
  void ack(const Envelope& request, const HostId& at, std::optional<core::StateReport> report,
           const Error* error = nullptr);

  void supervise();
  void decide(Trigger trigger, Tick trigger_tick, std::set<std::string> excluded, Trigger origin);
  void reconsider_on_info(Tick raised);
  void execute(const qos::ConfigurationGraph& config, qos::Binding binding, Trigger trigger, Tick trigger_tick,
               std::set<std::string> excluded, Trigger origin);
  void notify(Trigger trigger, const qos::ContextSnapshot& context, const std::set<std::string>& excluded,
              const std::optional<qos::Selection>& selection);
  void run_batches();
  using Failure = std::pair<std::string, std::string>;
  std::optional<Failure> send_request(const Request& request);
  void abandon_pe(const PeId& id);
  void fail(const std::string& cause, const std::string& detail);
  void complete();
  void check_migrations();
  void send_state_reports();

  HostId correspondent_for(const HostId& host, const qos::Binding& binding) const;
  std::optional<HostId> uc_host(const std::string& subject) const;
  std::uint64_t next_request() { return next_request_++; }

  World& world_;
  qos::ConfigurationFamily family_;
  std::optional<CurrentConfiguration> current_;
  std::optional<Execution> exec_;
  std::vector<Notice> deferred_;
  bool started_ = false;
  bool degraded_ = false;
  int reconfigurations_ = 0;
  std::set<HostId> unsupervised_;
  std::uint64_t next_request_ = 1;
  std::vector<DecisionObserver> observers_;
};

}  // namespace hetadapt::platform
