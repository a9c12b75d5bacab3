// Headless acceptance run: one PASS/FAIL line per criterion, exit 1 if any
// failed. Everything goes through the simulator and the property runners.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "../support/properties.hpp"
#include "pimhub/sim/scenario.hpp"
#include "pimhub/sim/simulator.hpp"
#include "pimhub/sim/sweep.hpp"
#include "pimhub/sim/trace.hpp"

using namespace pimhub;
using namespace pimhub::sim;

namespace {

std::string source(const std::string &rel) { return std::string(PIMHUB_SOURCE_DIR) + "/" + rel; }

Scenario scenario(const std::string &name) {
  return load_scenario_file(source("scenarios/" + name + ".scenario"));
}

struct Check {
  bool ok = true;
  std::ostringstream why;

  void expect(bool cond, const std::string &what) {
    if (!cond) {
      ok = false;
      why << (why.tellp() > 0 ? "; " : "") << what;
    }
  }
};

struct Executed {
  std::unique_ptr<Simulator> sim;
  RunResult result;
};

Executed execute(const Scenario &s, std::uint64_t seed,
                 const std::function<void(Simulator &, std::size_t)> &afterStep = {}) {
  Executed e;
  e.sim = std::make_unique<Simulator>(SimOptions{seed}, s.name);
  for (std::size_t i = 0; i < s.steps.size(); ++i) {
    e.sim->execute(s.steps[i], i + 1);
    if (afterStep)
      afterStep(*e.sim, i);
  }
  e.result = e.sim->finish();
  return e;
}

void golden(Check &c, const std::string &name, const RunResult &r) {
  const auto path = source("tests/golden/" + name + ".trace");
  if (!std::filesystem::exists(path)) {
    c.expect(false, "missing golden trace");
    return;
  }
  c.expect(read_trace_file(path) == r.trace, "trace differs from golden");
}

void failures(Check &c, const RunResult &r) {
  for (const auto &f : r.failures)
    c.expect(false, "step " + std::to_string(f.step) + ": " + f.message);
}

std::string first_load_url(const Scenario &s, const std::string &alias) {
  for (const auto &step : s.steps)
    if (const auto *l = std::get_if<Load>(&step.body); l && l->session == alias)
      return l->url;
  return {};
}

int failed = 0;

void report(const std::string &name, const Check &c, const std::string &detail) {
  if (!c.ok)
    ++failed;
  std::printf("%s %-28s %s\n", c.ok ? "PASS" : "FAIL", name.c_str(),
              c.ok ? detail.c_str() : c.why.str().c_str());
  std::fflush(stdout);
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void redirect_interaction() {
  Check c;
  const auto s = scenario("fig8");
  const auto t0 = std::chrono::steady_clock::now();
  auto e = execute(s, 1);
  const double secs = since(t0);
  failures(c, e.result);
  const auto b = e.sim->session("B").count_applied(CommandAction::ReplayEvent);
  const auto a = e.sim->session("A").count_applied(CommandAction::ReplayEvent);
  const auto p = e.sim->session("C").count_applied(CommandAction::ReplayEvent);
  c.expect(b == 1, "B applied " + std::to_string(b) + " replays");
  c.expect(a == 0 && p == 0, "replays outside B");
  golden(c, "fig8", e.result);
  c.expect(secs < 1.0, "took " + std::to_string(secs) + " s");
  std::ostringstream d;
  d << "B=1 A=0 C=0 replays, golden trace, " << secs << " s";
  report("redirect-interaction", c, d.str());
}

void control_navigation() {
  Check c;
  const auto s = scenario("fig9");
  auto e = execute(s, 1);
  failures(c, e.result);
  const auto nav = e.sim->session("B").count_applied(CommandAction::Navigate);
  c.expect(nav == 5, "B applied " + std::to_string(nav) + " navigations");
  c.expect(e.sim->session("A").count_applied(CommandAction::Navigate) == 0, "A navigated");
  const auto url = e.sim->session("A").page().url;
  c.expect(url == first_load_url(s, "A"), "A moved to " + url);
  golden(c, "fig9", e.result);
  report("control-navigation", c, "5 Navigate in B, controller URL unchanged, golden trace");
}

void open_in() {
  Check c;
  auto e = execute(scenario("fig7"), 1);
  failures(c, e.result);
  auto &m = e.sim->session("M");
  const auto opened = m.count_applied(CommandAction::OpenUrlWithObjects);
  c.expect(opened == 1, std::to_string(opened) + " OpenUrlWithObjects");
  std::set<ObjectId> online;
  for (const auto &[key, rec] : e.sim->hub().ledger().records())
    if (key.second == *m.session_id() && rec.state == PresenceState::Online)
      online.insert(key.first);
  c.expect(online == std::set<ObjectId>{e.sim->object("search"), e.sim->object("results")},
           "online set in M is wrong (" + std::to_string(online.size()) + " objects)");
  report("open-in", c, "one OpenUrlWithObjects, exactly {search, results} online in M");
}

void rule_auto_trigger() {
  Check c;
  const auto s = scenario("fig6");
  std::uint64_t firstFire = 0;
  std::size_t logAtFire = 0;
  std::optional<RuleId> rule;
  auto e = execute(s, 1, [&](Simulator &sim, std::size_t) {
    if (!rule) {
      try {
        rule = sim.rule("wiki");
      } catch (const Error &) {
        return;
      }
    }
    if (firstFire == 0 && sim.hub().fire_count(*rule) > 0) {
      firstFire = sim.hub().fire_count(*rule);
      logAtFire = sim.hub().log().size();
    }
  });
  failures(c, e.result);
  c.expect(rule.has_value(), "rule never defined");
  if (rule) {
    c.expect(firstFire == 1, "fired " + std::to_string(firstFire) + " times on the rising edge");
    const auto total = e.sim->hub().fire_count(*rule);
    c.expect(total == 1, "fired " + std::to_string(total) + " times overall");
  }
  std::size_t later = 0;
  const auto &log = e.sim->hub().log();
  for (std::size_t i = logAtFire; i < log.size(); ++i)
    if (log[i].event == LogEvent::In && log[i].message &&
        log[i].message->kind() == wire::Kind::PresenceUpdate)
      ++later;
  c.expect(later >= 10, "only " + std::to_string(later) + " presence events after firing");
  report("rule-auto-trigger", c,
         "fired once, +" + std::to_string(later) + " presence events, 0 more firings");
}

void convergence_sweep() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t runs = 0;
  for (const char *name : {"fig8", "fig9", "fig7", "fig6"}) {
    SweepOptions o;
    o.seeds = 100;
    o.dupRate = 0.2;
    const auto r = sweep_interleavings(scenario(name), o);
    runs += r.runs;
    for (const auto &v : r.violations)
      c.expect(false, std::string(name) + " seed " + std::to_string(v.seed) + ": " + v.message);
  }
  const double secs = since(t0);
  c.expect(secs < 60.0, "took " + std::to_string(secs) + " s");
  std::ostringstream d;
  d << "4 scenarios x 100 seeds (+ duplicate delivery), 0 violations, " << secs << " s";
  report("convergence-sweep", c, d.str());
}

void rule_oracle() {
  Check c;
  const auto r = testsupport::rule_engine_equivalence(2026, 1000);
  c.expect(r.ok(), r.first);
  const auto q = testsupport::condition_equivalence(2026, 1000);
  c.expect(q.ok(), q.first);
  c.expect(r.positives > 0 && q.positives > 0, "nothing ever fired");
  report("rule-oracle-equivalence", c,
         "1000 instances, " + std::to_string(r.checked) + " events, " +
             std::to_string(r.positives) + " firings, " + std::to_string(q.checked) +
             " condition checks, exact match");
}

void ledger_permutations() {
  Check c;
  const auto r = testsupport::ledger_permutations(2026, 500);
  c.expect(r.ok(), r.first);
  report("ledger-permutations", c, std::to_string(r.checked) + " update sets of <= 8, all orders agree");
}

void restart_durability() {
  Check c;
  const auto dir = std::filesystem::temp_directory_path() / "pimhub-acceptance-store";
  const auto r = testsupport::restart_durability(2026, 500, dir.string());
  c.expect(r.ok(), r.first);
  std::filesystem::remove_all(dir);
  report("restart-durability", c, "500 mutations, restored state structurally equal");
}

} // namespace

int main() {
  const std::pair<const char *, void (*)()> criteria[] = {
      {"redirect-interaction", redirect_interaction},
      {"control-navigation", control_navigation},
      {"open-in", open_in},
      {"rule-auto-trigger", rule_auto_trigger},
      {"convergence-sweep", convergence_sweep},
      {"rule-oracle-equivalence", rule_oracle},
      {"ledger-permutations", ledger_permutations},
      {"restart-durability", restart_durability},
  };
  for (const auto &[name, run] : criteria) {
    try {
      run();
    } catch (const std::exception &e) {
      Check c;
      c.expect(false, std::string("threw: ") + e.what());
      report(name, c, "");
    }
  }
  return failed == 0 ? 0 : 1;
}
