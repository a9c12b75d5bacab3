#include <doctest.h>

#include "pimhub/sim/scenario.hpp"
#include "pimhub/sim/simulator.hpp"
#include "pimhub/sim/trace.hpp"
#include "pimhub/wire/codec.hpp"

using namespace pimhub;
using namespace pimhub::sim;

namespace {

std::string source(const std::string &rel) { return std::string(PIMHUB_SOURCE_DIR) + "/" + rel; }

// "<kind> <conn> <frame>" -> frame
std::string frame_of(const std::string &line) {
  const auto a = line.find(' ');
  const auto b = line.find(' ', a + 1);
  return line.substr(b + 1);
}

} // namespace

TEST_SUITE("trace") {

TEST_CASE("format and parse are inverse") {
  const RunResult r = run_scenario(load_scenario_file(source("scenarios/fig9.scenario")), {3});
  const std::string text = format_trace(r.trace);
  CHECK(parse_trace(text) == r.trace);
  CHECK(text.back() == '\n');
}

TEST_CASE("golden traces still match") {
  for (const char *name : {"fig8", "fig9"}) {
    CAPTURE(name);
    const Trace golden = read_trace_file(source(std::string("tests/golden/") + name + ".trace"));
    const RunResult r =
        run_scenario(load_scenario_file(source(std::string("scenarios/") + name + ".scenario")), {1});
    CHECK(r.ok());
    REQUIRE(r.trace.lines.size() == golden.lines.size());
    for (std::size_t i = 0; i < golden.lines.size(); ++i) {
      CAPTURE(i);
      CHECK(r.trace.lines[i] == golden.lines[i]);
    }
  }
}

TEST_CASE("golden traces replay against a fresh hub") {
  for (const char *name : {"fig8", "fig9"}) {
    CAPTURE(name);
    const ReplayResult rr = replay_trace(read_trace_file(source(std::string("tests/golden/") + name + ".trace")));
    INFO(rr.message);
    CHECK(rr.ok);
    CHECK(rr.replayed > 0);
  }
}

TEST_CASE("every scenario trace replays, restarts included") {
  for (const char *name : {"fig6", "fig7", "mirror", "churn"}) {
    CAPTURE(name);
    const RunResult r = run_scenario(load_scenario_file(source(std::string("scenarios/") + name + ".scenario")), {11});
    const ReplayResult rr = replay_trace(r.trace);
    INFO(rr.message);
    CHECK(rr.ok);
    CHECK(rr.digest == r.digest);
  }
}

TEST_CASE("a tampered trace is caught") {
  Trace t = read_trace_file(source("tests/golden/fig8.trace"));
  for (auto &line : t.lines)
    if (line.rfind("out ", 0) == 0 && line.find("ReplayEvent") != std::string::npos) {
      line.replace(line.find("click"), 5, "dblclick");
      break;
    }
  CHECK_FALSE(replay_trace(t).ok);
}

TEST_CASE("a captured presence frame decodes to the record its session reported") {
  const Trace t = read_trace_file(source("tests/golden/fig8.trace"));
  std::map<std::string, SessionId> sessionOfConn;
  std::size_t checked = 0;
  for (const auto &line : t.lines) {
    const auto kind = line.substr(0, line.find(' '));
    if (kind != "in" && kind != "out")
      continue;
    const std::string conn = line.substr(kind.size() + 1, line.find(' ', kind.size() + 1) - kind.size() - 1);
    const wire::WireMessage m = wire::decode(frame_of(line));
    CHECK(wire::encode(m) == frame_of(line));
    if (const auto *w = m.as<wire::Welcome>(); w && kind == "out")
      sessionOfConn[conn] = w->session;
    if (const auto *p = m.as<wire::PresenceUpdate>(); p && kind == "in") {
      for (const auto &rec : p->records) {
        CHECK(rec.sessionId == sessionOfConn.at(conn));
        CHECK(rec.seq > 0);
        ++checked;
      }
    }
  }
  CHECK(checked > 0);
}

} // TEST_SUITE
