#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pimhub/hub/hub.hpp"
#include "pimhub/sim/scenario.hpp"
#include "pimhub/sim/session.hpp"
#include "pimhub/sim/trace.hpp"

namespace pimhub::sim {

struct SimOptions {
  std::uint64_t seed = 1;
  /// Probability that a delivered message is delivered a second time
  /// straight away. Drawn from its own generator so the schedule is the
  /// same with and without duplicates.
  double dupRate = 0.0;
  /// Fault injection: turn off msgId dedupe in the hub and in every session.
  bool brokenDedupe = false;
  /// Run only the first N steps (used to minimize failing runs).
  std::optional<std::size_t> stepLimit;
};

struct Failure {
  std::size_t step = 0; // 1-based; 0 = end of run
  std::size_t line = 0;
  std::string message;
  bool convergence = false;
};

struct RunResult {
  std::vector<Failure> failures;
  Trace trace;
  std::string digest;
  /// Hub digest plus every session's views; equal fingerprints mean equal
  /// observable end states.
  std::string fingerprint;
  double seconds = 0;

  bool ok() const noexcept { return failures.empty(); }
  std::size_t violations() const;
};

/// Drives one hub and a set of virtual sessions over per-session FIFO
/// channels. The seed picks which channel delivers next.
class Simulator {
public:
  explicit Simulator(SimOptions options, std::string scenarioName = "scenario");
  ~Simulator();

  /// Throws Error(ScenarioError) when a reference cannot be resolved.
  void execute(const Step &step, std::size_t index);
  void settle();
  /// Delivers one message from a randomly chosen non-empty channel.
  bool deliver_one();
  std::size_t pending() const;

  Hub &hub() { return *hub_; }
  VirtualSession &session(const std::string &alias);
  const ObjectId &object(const std::string &alias) const;
  const RuleId &rule(const std::string &alias) const;

  /// Only meaningful once settled.
  std::vector<std::string> convergence_violations() const;
  const std::vector<Failure> &failures() const noexcept { return failures_; }

  /// Settles, checks convergence and closes the trace.
  RunResult finish();

private:
  struct Up {
    ConnectionId conn = 0;
    std::string frame;
    bool close = false;
  };
  struct Down {
    Delivery delivery;
    std::string frame;
  };
  struct Slot {
    std::unique_ptr<VirtualSession> client;
    ConnectionId conn = 0;
    bool hubOpen = false;
    std::deque<Up> up;
    std::deque<Down> down;
    std::vector<wire::WireMessage> routed;
  };

  void new_hub();
  void flush_hub_log(bool closeSection);
  void route(std::vector<Delivery> out);
  void pump();
  void await(const std::function<bool()> &done, const std::string &what);
  void connect(Slot &slot);
  Slot &slot(const std::string &alias);
  Bindings resolve_bindings(const std::string &behaviour, const Args &args);
  std::string resolve_value(const std::string &raw);
  void check(const Expect &e, std::size_t index, std::size_t line);
  bool chance();

  SimOptions options_;
  std::string name_;
  std::mt19937_64 rng_;
  std::mt19937_64 dupRng_;
  std::shared_ptr<MemoryStore> store_;
  std::unique_ptr<Hub> hub_;
  std::uint64_t hubCount_ = 0;
  std::size_t logFlushed_ = 0;
  ConnectionId nextConn_ = 1;
  PageLibrary pages_;
  std::vector<Slot> slots_;
  std::map<std::string, std::size_t> slotIndex_;
  std::map<ConnectionId, std::size_t> connSlot_;
  std::map<std::string, ObjectId> objects_;
  std::map<std::string, RuleId> rules_;
  std::vector<std::string> trace_;
  std::vector<Failure> failures_;
};

RunResult run_scenario(const Scenario &scenario, const SimOptions &options = {});

} // namespace pimhub::sim
