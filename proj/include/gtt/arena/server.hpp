#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "gtt/arena/service.hpp"

namespace gtt {

/// HTTP+JSON front end:
///   POST /sessions, GET /sessions/{id}, POST /sessions/{id}/messages,
///   POST /sessions/{id}/verdict, GET /leaderboard, GET /models.
/// Errors are {"error": code, "message": text} with the matching status.
class ArenaServer {
 public:
  explicit ArenaServer(std::shared_ptr<ArenaService> service,
                       std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~ArenaServer();

  /// Binds and returns the port; port 0 picks a free one.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind.
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gtt
