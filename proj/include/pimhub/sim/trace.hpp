#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pimhub/hub/hub.hpp"

namespace pimhub::sim {

// Line-oriented trace (docs/trace-format.md):
//   pimhub-trace 1
//   scenario <name>
//   seed <n>
//   hub <seed> dedupe=<0|1>           one per hub instance, shared store
//   open|close <conn>
//   in|out <conn> <frame>
//   gone <conn> <origin|-> <frame>
//   state <sha256>                     closes each hub section
//   applied <alias> <frame>            per-session command logs
//   end
struct Trace {
  std::vector<std::string> lines;

  friend bool operator==(const Trace &, const Trace &) = default;
};

std::string format_trace(const Trace &trace);
Trace parse_trace(std::string_view text);
Trace read_trace_file(const std::string &path);
void write_trace_file(const Trace &trace, const std::string &path);

/// Appends one line per hub log entry from `from` on.
void append_hub_log(std::vector<std::string> &lines, const std::vector<LogEntry> &log,
                    std::size_t from = 0);

struct ReplayResult {
  bool ok = false;
  std::string message;
  std::string digest; // of the last hub
  std::size_t replayed = 0; // inbound messages fed
};

/// Feeds open/in/close/gone entries to fresh hubs (one per `hub` line, over
/// one in-memory store) and checks every out line and state digest.
ReplayResult replay_trace(const Trace &trace);

} // namespace pimhub::sim
