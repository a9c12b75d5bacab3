#include "pimhub/sim/sweep.hpp"

#include <chrono>

#include "pimhub/core/error.hpp"

namespace pimhub::sim {
namespace {

struct Outcome {
  std::optional<RunResult> run;
  std::vector<std::string> problems;
};

Outcome attempt(const Scenario &sc, const SimOptions &opt) {
  Outcome o;
  try {
    o.run = run_scenario(sc, opt);
    for (const auto &f : o.run->failures)
      o.problems.push_back((f.step ? "step " + std::to_string(f.step) + ": " : "end: ") +
                           f.message);
  } catch (const Error &e) {
    o.problems.push_back(e.what());
  }
  return o;
}

// Runs both variants (clean and, if asked, with duplicates) and lists what
// went wrong.
std::pair<std::vector<std::string>, Trace> judge(const Scenario &sc, SimOptions opt,
                                                 const SweepOptions &sw) {
  opt.dupRate = 0;
  opt.brokenDedupe = sw.brokenDedupe;
  auto clean = attempt(sc, opt);
  auto problems = clean.problems;
  Trace trace = clean.run ? clean.run->trace : Trace{};
  if (sw.dupRate > 0) {
    opt.dupRate = sw.dupRate;
    auto dup = attempt(sc, opt);
    for (auto &p : dup.problems)
      problems.push_back("with duplicates: " + p);
    if (clean.run && dup.run && clean.run->fingerprint != dup.run->fingerprint) {
      problems.push_back("duplicate delivery changed the final state");
      trace = dup.run->trace;
    }
  }
  return {problems, trace};
}

} // namespace

SweepReport sweep_interleavings(const Scenario &scenario, const SweepOptions &options) {
  const auto t0 = std::chrono::steady_clock::now();
  SweepReport report;
  std::size_t minimized = 0;
  for (std::uint64_t i = 0; i < options.seeds; ++i) {
    SimOptions opt;
    opt.seed = options.firstSeed + i;
    auto [problems, trace] = judge(scenario, opt, options);
    ++report.runs;
    if (problems.empty())
      continue;
    SweepViolation v;
    v.seed = opt.seed;
    v.message = problems.front();
    if (problems.size() > 1)
      v.message += " (+" + std::to_string(problems.size() - 1) + " more)";
    v.trace = trace;
    if (minimized < options.minimize) {
      ++minimized;
      for (std::size_t n = 1; n <= scenario.steps.size(); ++n) {
        opt.stepLimit = n;
        auto [p, t] = judge(scenario, opt, options);
        if (!p.empty()) {
          v.minimizedSteps = n;
          v.trace = t;
          break;
        }
      }
    }
    report.violations.push_back(std::move(v));
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

} // namespace pimhub::sim
