#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "dexp/service.h"

namespace dexp {

/// WebSocket front end of a Service. Each text frame is one request; each
/// connection handles its requests in arrival order on a worker of its own,
/// so a new edit can cancel previews still running for the connection.
class Server {
 public:
  /// Port 0 picks a free port.
  Server(Service& service, std::uint16_t port,
         std::string address = "127.0.0.1");
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Bound port, valid after construction.
  std::uint16_t port() const;

  /// Serves on a background thread.
  void start();
  /// Closes the listener and every connection, then joins all threads.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dexp
