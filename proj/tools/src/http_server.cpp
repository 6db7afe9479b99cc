#include "trailmap/tools/http_server.hpp"

#include <sys/socket.h>

#include <httplib.h>

namespace trailmap::tools {

struct HttpServer::Impl {
  httplib::Server server;
};

namespace {

ApiRequest to_api_request(const httplib::Request& req) {
  ApiRequest out;
  out.method = req.method;
  out.path = req.path;
  // Repeated keys keep the first value.
  for (const auto& [key, value] : req.params) out.params.emplace(key, value);
  out.body = req.body;
  return out;
}

}  // namespace

HttpServer::HttpServer(AnalyticsService& service, std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>()) {
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    const ApiResponse r = service.handle(to_api_request(req));
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  // httplib defaults to SO_REUSEPORT, which lets a second server share an
  // occupied port silently.
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  impl_->server.Get(R"(/api(/.*)?)", forward);
  impl_->server.Post(R"(/api(/.*)?)", forward);
  impl_->server.Put(R"(/api(/.*)?)", forward);
  impl_->server.Delete(R"(/api(/.*)?)", forward);
  if (static_dir) impl_->server.set_mount_point("/", static_dir->string());
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(host);
    return port_ > 0;
  }
  if (!impl_->server.bind_to_port(host, port)) return false;
  port_ = port;
  return true;
}

bool HttpServer::run() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace trailmap::tools
