// pimhub: scenario runner, interleaving sweeper, trace replayer and the
// WebSocket hub itself.

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pimhub/core/error.hpp"
#include "pimhub/hub/ws_server.hpp"
#include "pimhub/sim/sweep.hpp"

using namespace pimhub;

namespace {

int cmd_run(const std::string &file, std::uint64_t seed, const std::string &tracePath,
            double dupRate, bool brokenDedupe) {
  auto sc = sim::load_scenario_file(file);
  sim::SimOptions opt;
  opt.seed = seed;
  opt.dupRate = dupRate;
  opt.brokenDedupe = brokenDedupe;
  auto r = sim::run_scenario(sc, opt);
  if (!tracePath.empty())
    sim::write_trace_file(r.trace, tracePath);
  for (const auto &f : r.failures) {
    if (f.step)
      std::cout << "FAIL step " << f.step << " (line " << f.line << "): " << f.message << "\n";
    else
      std::cout << "FAIL end of run: " << f.message << "\n";
  }
  std::printf("%s seed %llu: %zu steps, %zu failures, %zu violations, %.3f s\n",
              sc.name.c_str(), static_cast<unsigned long long>(seed), sc.steps.size(),
              r.failures.size(), r.violations(), r.seconds);
  if (!tracePath.empty())
    std::cout << "trace written to " << tracePath << "\n";
  return r.ok() ? 0 : 1;
}

int cmd_sweep(const std::string &file, std::uint64_t seeds, std::uint64_t first,
              double dupRate, bool brokenDedupe, const std::string &reportTrace) {
  auto sc = sim::load_scenario_file(file);
  sim::SweepOptions opt;
  opt.seeds = seeds;
  opt.firstSeed = first;
  opt.dupRate = dupRate;
  opt.brokenDedupe = brokenDedupe;
  auto rep = sim::sweep_interleavings(sc, opt);
  for (const auto &v : rep.violations) {
    std::cout << "seed " << v.seed << ": " << v.message;
    if (v.minimizedSteps)
      std::cout << " [fails within the first " << v.minimizedSteps << " steps]";
    std::cout << "\n";
  }
  if (!reportTrace.empty() && !rep.violations.empty()) {
    sim::write_trace_file(rep.violations.front().trace, reportTrace);
    std::cout << "minimized trace of seed " << rep.violations.front().seed
              << " written to " << reportTrace << "\n";
  }
  std::printf("%s: %zu seeds, %zu violations, %.2f s\n", sc.name.c_str(), rep.runs,
              rep.violations.size(), rep.seconds);
  return rep.violations.empty() ? 0 : 1;
}

int cmd_replay(const std::string &file) {
  auto r = sim::replay_trace(sim::read_trace_file(file));
  if (!r.ok) {
    std::cout << "replay failed: " << r.message << "\n";
    return 1;
  }
  std::cout << "replayed " << r.replayed << " messages, state " << r.digest << "\n";
  return 0;
}

int cmd_serve(const std::string &listen, const std::string &storePath,
              const std::string &authPath, std::uint64_t seed) {
  ServerOptions so;
  auto colon = listen.rfind(':');
  if (colon == std::string::npos) {
    std::cerr << "--listen wants host:port\n";
    return 2;
  }
  so.address = listen.substr(0, colon);
  so.port = static_cast<std::uint16_t>(std::stoul(listen.substr(colon + 1)));
  so.stopOnSignal = true;

  std::shared_ptr<PimStore> store;
  if (!storePath.empty())
    store = std::make_shared<FileStore>(
        storePath, authPath.empty() ? std::nullopt
                                    : std::optional<std::filesystem::path>(authPath));
  HubOptions ho;
  ho.seed = seed;
  ho.keepLog = false;
  std::unique_ptr<Hub> hub;
  try {
    hub = std::make_unique<Hub>(ho, store);
  } catch (const Error &e) {
    std::cerr << "refusing to start: " << e.what() << "\n";
    return 1;
  }
  WsServer server(*hub, so);
  std::cout << "pimhub listening on ws://" << so.address << ":" << server.port() << so.path
            << (storePath.empty() ? " (no store)" : " (store " + storePath + ")") << std::endl;
  server.run();
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"pimhub: DUI synchronization hub and simulation harness"};
  app.require_subcommand(1);

  std::string file, tracePath, reportTrace;
  std::uint64_t seed = 1, seeds = 100, firstSeed = 1;
  double dupRate = 0.0;
  bool brokenDedupe = false;

  auto *run = app.add_subcommand("run", "run a scenario once");
  run->add_option("scenario", file, "scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "interleaving seed");
  run->add_option("--trace", tracePath, "write the trace here");
  run->add_option("--dup-rate", dupRate, "duplicate delivery probability")
      ->check(CLI::Range(0.0, 1.0));
  run->add_flag("--broken-dedupe", brokenDedupe, "disable msgId dedupe (fault injection)");

  auto *sweep = app.add_subcommand("sweep", "run a scenario under many interleavings");
  sweep->add_option("scenario", file, "scenario file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--seeds", seeds, "number of seeds")->required();
  sweep->add_option("--first-seed", firstSeed, "first seed");
  sweep->add_option("--dup-rate", dupRate, "also run with duplicate delivery")
      ->check(CLI::Range(0.0, 1.0));
  sweep->add_flag("--broken-dedupe", brokenDedupe, "disable msgId dedupe (fault injection)");
  sweep->add_option("--report-trace", reportTrace, "minimized trace of the first violation");

  std::string listen = "127.0.0.1:8787", storePath, authPath;
  std::uint64_t hubSeed = 0;
  auto *serve = app.add_subcommand("serve", "start the hub (WebSocket path /sync)");
  serve->add_option("--listen", listen, "host:port")->envname("PIMHUB_LISTEN");
  serve->add_option("--store", storePath, "PIM store file")->envname("PIMHUB_STORE");
  serve->add_option("--auth", authPath, "separate credential store file")
      ->envname("PIMHUB_AUTH");
  serve->add_option("--seed", hubSeed, "seed for salts and tokens (0 = random)");

  auto *replay = app.add_subcommand("replay", "replay a trace on a fresh hub");
  replay->add_option("trace", file, "trace file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run)
      return cmd_run(file, seed, tracePath, dupRate, brokenDedupe);
    if (*sweep)
      return cmd_sweep(file, seeds, firstSeed, dupRate, brokenDedupe, reportTrace);
    if (*replay)
      return cmd_replay(file);
    if (*serve) {
      if (hubSeed == 0)
        hubSeed = std::random_device{}();
      return cmd_serve(listen, storePath, authPath, hubSeed);
    }
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
