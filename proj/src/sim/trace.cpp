#include "pimhub/sim/trace.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "pimhub/core/error.hpp"

namespace pimhub::sim {
namespace {

std::uint64_t to_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw Error(Errc::MalformedFrame, "bad number '" + std::string(s) + "'");
  return v;
}

// "<word> <rest>"
std::pair<std::string_view, std::string_view> head(std::string_view s) {
  auto sp = s.find(' ');
  if (sp == std::string_view::npos)
    return {s, {}};
  return {s.substr(0, sp), s.substr(sp + 1)};
}

} // namespace

std::string format_trace(const Trace &trace) {
  std::string out;
  for (const auto &l : trace.lines) {
    out += l;
    out += '\n';
  }
  return out;
}

Trace parse_trace(std::string_view text) {
  Trace t;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos)
      nl = text.size();
    if (nl > pos)
      t.lines.emplace_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return t;
}

Trace read_trace_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(Errc::NotFound, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str());
}

void write_trace_file(const Trace &trace, const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot write " + path);
  out << format_trace(trace);
}

void append_hub_log(std::vector<std::string> &lines, const std::vector<LogEntry> &log,
                    std::size_t from) {
  for (std::size_t i = from; i < log.size(); ++i) {
    const auto &e = log[i];
    std::string line(to_string(e.event));
    line += ' ';
    line += std::to_string(e.connection);
    if (e.event == LogEvent::Gone)
      line += ' ' + (e.origin ? e.origin->str() : std::string("-"));
    if (e.message)
      line += ' ' + wire::encode(*e.message);
    lines.push_back(std::move(line));
  }
}

ReplayResult replay_trace(const Trace &trace) {
  ReplayResult res;
  auto store = std::make_shared<MemoryStore>();
  std::unique_ptr<Hub> hub;
  std::vector<std::string> expected; // recorded lines of the current section
  std::size_t sectionStart = 0;

  auto check_section = [&](std::string_view digest) -> bool {
    std::vector<std::string> got;
    append_hub_log(got, hub->log());
    if (got != expected) {
      std::size_t i = 0;
      while (i < got.size() && i < expected.size() && got[i] == expected[i])
        ++i;
      res.message = "hub section at line " + std::to_string(sectionStart + 1) +
                    " diverges at entry " + std::to_string(i + 1) + ": expected '" +
                    (i < expected.size() ? expected[i] : "<end>") + "', replay gave '" +
                    (i < got.size() ? got[i] : "<end>") + "'";
      return false;
    }
    res.digest = hub->state_digest();
    if (res.digest != digest) {
      res.message = "state digest mismatch: recorded " + std::string(digest) +
                    ", replay " + res.digest;
      return false;
    }
    return true;
  };

  try {
    if (trace.lines.empty() || trace.lines.front() != "pimhub-trace 1") {
      res.message = "not a pimhub trace";
      return res;
    }
    for (std::size_t n = 1; n < trace.lines.size(); ++n) {
      const auto &line = trace.lines[n];
      auto [verb, rest] = head(line);
      if (verb == "scenario" || verb == "seed" || verb == "applied" || verb == "end")
        continue;
      if (verb == "hub") {
        if (hub) {
          res.message = "line " + std::to_string(n + 1) + ": hub section without state";
          return res;
        }
        auto [seed, flag] = head(rest);
        HubOptions opt;
        opt.seed = to_u64(seed);
        opt.dedupe = flag != "dedupe=0";
        hub = std::make_unique<Hub>(opt, store);
        expected.clear();
        sectionStart = n;
        continue;
      }
      if (!hub) {
        res.message = "line " + std::to_string(n + 1) + ": entry outside a hub section";
        return res;
      }
      if (verb == "state") {
        if (!check_section(rest))
          return res;
        hub.reset();
        continue;
      }
      expected.push_back(line);
      auto [connText, payload] = head(rest);
      const ConnectionId conn = to_u64(connText);
      if (verb == "open") {
        hub->open(conn);
      } else if (verb == "close") {
        hub->close(conn);
      } else if (verb == "in") {
        auto msg = wire::decode(payload);
        msg.serverSeq.reset();
        hub->receive(conn, std::move(msg));
        ++res.replayed;
      } else if (verb == "gone") {
        auto [origin, frame] = head(payload);
        Delivery d{conn, wire::decode(frame), std::nullopt};
        if (origin != "-")
          d.origin = SessionId(std::string(origin));
        hub->undeliverable(d);
      } else if (verb != "out") {
        res.message = "line " + std::to_string(n + 1) + ": unknown entry '" +
                      std::string(verb) + "'";
        return res;
      }
    }
  } catch (const Error &e) {
    res.message = e.what();
    return res;
  }
  if (hub) {
    res.message = "trace ends inside a hub section";
    return res;
  }
  res.ok = true;
  return res;
}

} // namespace pimhub::sim
