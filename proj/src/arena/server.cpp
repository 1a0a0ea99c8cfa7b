#include "gtt/arena/server.hpp"

#include <httplib.h>

namespace gtt {

using json = nlohmann::json;

struct ArenaServer::Impl {
  std::shared_ptr<ArenaService> service;
  httplib::Server http;
};

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ArenaError(400, "bad_request", std::string("malformed JSON: ") + e.what());
  }
}

template <typename F>
httplib::Server::Handler guarded(int ok_status, F f) {
  return [ok_status, f](const httplib::Request& req, httplib::Response& res) {
    try {
      send_json(res, ok_status, f(req));
    } catch (const ArenaError& e) {
      send_json(res, e.status(), {{"error", e.code()}, {"message", e.what()}});
    } catch (const ConfigError& e) {
      send_json(res, 400, {{"error", "bad_request"}, {"message", e.what()}});
    } catch (const std::exception& e) {
      send_json(res, 500, {{"error", "internal"}, {"message", e.what()}});
    }
  };
}

}  // namespace

ArenaServer::ArenaServer(std::shared_ptr<ArenaService> service, std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>()) {
  impl_->service = std::move(service);
  auto& http = impl_->http;
  auto svc = impl_->service;

  http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                            {"Access-Control-Allow-Headers", "Content-Type"},
                            {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  http.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  http.Post("/sessions", guarded(201, [svc](const httplib::Request& req) {
              return svc->create_session(create_request_from_json(parse_body(req)));
            }));
  http.Get(R"(/sessions/([0-9a-f]+))",
           guarded(200, [svc](const httplib::Request& req) { return svc->get_session(req.matches[1]); }));
  http.Post(R"(/sessions/([0-9a-f]+)/messages)", guarded(200, [svc](const httplib::Request& req) {
              const json body = parse_body(req);
              if (!body.contains("text") || !body.at("text").is_string()) {
                throw ArenaError(400, "bad_request", "body needs a string 'text'");
              }
              return svc->post_message(req.matches[1], body.at("text").get<std::string>());
            }));
  http.Post(R"(/sessions/([0-9a-f]+)/verdict)", guarded(200, [svc](const httplib::Request& req) {
              const json body = parse_body(req);
              if (!body.contains("verdict") || !body.at("verdict").is_number_integer()) {
                throw ArenaError(400, "bad_request", "body needs an integer 'verdict'");
              }
              return svc->submit_verdict(req.matches[1], body.at("verdict").get<int>());
            }));
  http.Get("/leaderboard", guarded(200, [svc](const httplib::Request&) { return svc->leaderboard(); }));
  http.Get("/models", guarded(200, [svc](const httplib::Request&) { return svc->models(); }));

  if (static_dir) http.set_mount_point("/", static_dir->string());
}

ArenaServer::~ArenaServer() { stop(); }

int ArenaServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->http.bind_to_any_port(host);
  if (!impl_->http.bind_to_port(host, port)) return -1;
  return port;
}

void ArenaServer::serve() { impl_->http.listen_after_bind(); }

void ArenaServer::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

}  // namespace gtt
