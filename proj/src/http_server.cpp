#include <atomic>

#include "httplib.h"
#include "iroplan/service.hpp"

namespace iroplan {

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;
  std::thread thread;
  std::atomic<bool> running{false};

  explicit Impl(Service& s) : service(s) {}

  void route(const httplib::Request& in, httplib::Response& out) {
    Request req;
    req.method = in.method;
    req.path = in.path;
    for (const auto& [k, v] : in.params) req.query[k] = v;
    if (in.has_header("If-Match")) {
      try {
        req.if_match = std::stoull(in.get_header_value("If-Match"));
      } catch (const std::exception&) {
        out.status = 400;
        out.set_content(R"({"error":"BadRequest","message":"If-Match must be a version number"})",
                        "application/json");
        return;
      }
    }
    if (!in.body.empty()) {
      try {
        req.body = Json::parse(in.body);
      } catch (const nlohmann::json::exception& e) {
        out.status = 400;
        out.set_content(Json{{"schema_version", kSchemaVersion},
                             {"error", "BadRequest"},
                             {"message", e.what()}}
                            .dump(),
                        "application/json");
        return;
      }
    }
    Response r = service.handle(req);
    out.status = r.status;
    out.set_content(r.body.dump(), "application/json");
  }

  /// Server-sent events: replays from ?since=N, then follows live events.
  /// With ?once=1 the stream ends after the backlog.
  void events(const httplib::Request& in, httplib::Response& out) {
    std::shared_ptr<Session> session;
    try {
      session = service.session(in.matches[1]);
    } catch (const Error& e) {
      out.status = 404;
      out.set_content(Json{{"schema_version", kSchemaVersion},
                           {"error", "UnknownResource"},
                           {"message", e.what()}}
                          .dump(),
                      "application/json");
      return;
    }
    auto cursor = std::make_shared<std::uint64_t>(
        in.has_param("since") ? std::stoull(in.get_param_value("since")) : 0);
    const bool once = in.has_param("once");
    out.set_header("Cache-Control", "no-cache");
    out.set_chunked_content_provider(
        "text/event-stream",
        [this, session, cursor, once](std::size_t, httplib::DataSink& sink) {
          auto batch = once ? session->events_since(*cursor)
                            : session->wait_events(*cursor, std::chrono::milliseconds(500));
          for (const auto& e : batch) {
            std::string chunk = "id: " + std::to_string(e.seq) + "\nevent: " + e.type +
                                "\ndata: " + e.data.dump() + "\n\n";
            if (!sink.write(chunk.data(), chunk.size())) return false;
            *cursor = e.seq;
          }
          if (once || !running) sink.done();
          return true;
        });
  }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {
  auto& server = impl_->server;
  server.Get(R"(/events/([^/]+))", [this](const httplib::Request& in, httplib::Response& out) {
    impl_->events(in, out);
  });
  auto handler = [this](const httplib::Request& in, httplib::Response& out) {
    impl_->route(in, out);
  };
  server.Get(".*", handler);
  server.Post(".*", handler);
  server.Put(".*", handler);
  server.Delete(".*", handler);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  auto& server = impl_->server;
  int bound = port;
  if (port == 0) {
    bound = server.bind_to_any_port(host);
  } else if (!server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error(ErrorCode::BadRequest, "cannot bind " + host + ":" + std::to_string(port));
  impl_->running = true;
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  return bound;
}

void HttpServer::stop() {
  if (!impl_ || !impl_->running.exchange(false)) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace iroplan
