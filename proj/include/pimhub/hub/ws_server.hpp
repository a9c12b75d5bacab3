#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "pimhub/hub/hub.hpp"

namespace pimhub {

struct ServerOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 8787; // 0 picks a free port
  std::string path = "/sync";
  bool stopOnSignal = false; // SIGINT/SIGTERM end run()
};

/// WebSocket front end for a Hub. One thread runs the io_context, so hub
/// calls are naturally serialized.
class WsServer {
public:
  WsServer(Hub &hub, ServerOptions options);
  ~WsServer();

  WsServer(const WsServer &) = delete;
  WsServer &operator=(const WsServer &) = delete;

  std::uint16_t port() const;
  /// Blocks until stop() is called from another thread (or a signal arrives
  /// when stopOnSignal is set).
  void run();
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace pimhub
