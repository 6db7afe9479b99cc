#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "trailmap/service.hpp"

namespace trailmap::tools {

// cpp-httplib front end for AnalyticsService: the JSON API under /api and,
// optionally, a static UI bundle under /.
class HttpServer {
 public:
  explicit HttpServer(AnalyticsService& service,
                      std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds without serving. Port 0 picks an ephemeral port. Returns false if
  // the address is unavailable.
  bool bind(const std::string& host, int port);
  int port() const { return port_; }

  // Blocks until stop() is called.
  bool run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = -1;
};

}  // namespace trailmap::tools
