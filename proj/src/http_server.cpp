#include <httplib.h>

#include <chrono>
#include <cstdio>

#include "slidelayout/service.hpp"

namespace slidelayout {

namespace {

constexpr int kWorkerThreads = 16;

thread_local std::chrono::steady_clock::time_point request_start;

void apply(const Response& r, httplib::Response& res) {
  res.status = r.status;
  res.set_content(r.body, r.content_type);
}

}  // namespace

struct HttpServer::Impl {
  httplib::Server server;
  LayoutService& service;
  LogSink log;

  Impl(LayoutService& svc, LogSink sink) : service(svc), log(std::move(sink)) {}
};

HttpServer::HttpServer(LayoutService& service, LogSink log)
    : impl_(std::make_unique<Impl>(service, std::move(log))) {
  auto& srv = impl_->server;
  LayoutService& svc = impl_->service;

  srv.new_task_queue = [] { return new httplib::ThreadPool(kWorkerThreads); };

  srv.set_pre_routing_handler([](const httplib::Request&, httplib::Response&) {
    request_start = std::chrono::steady_clock::now();
    return httplib::Server::HandlerResponse::Unhandled;
  });

  const std::string origin = svc.config().cors_origin;
  if (!origin.empty()) {
    srv.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
    srv.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  }

  if (impl_->log) {
    srv.set_logger([this](const httplib::Request& req, const httplib::Response& res) {
      const auto elapsed = std::chrono::duration<double, std::milli>(
          std::chrono::steady_clock::now() - request_start);
      char line[64];
      std::snprintf(line, sizeof(line), " %d %.2fms", res.status, elapsed.count());
      impl_->log(req.method + " " + req.path + line);
    });
  }

  srv.Post("/api/retrieve", [&svc](const httplib::Request& req, httplib::Response& res) {
    apply(svc.retrieve(req.body), res);
  });
  srv.Get("/api/heatmap", [&svc](const httplib::Request& req, httplib::Response& res) {
    const std::string raw = req.get_param_value("raw");
    apply(svc.heatmap(req.get_param_value("mode"), raw == "1" || raw == "true"), res);
  });
  srv.Post("/api/heatmap/overlay", [&svc](const httplib::Request& req, httplib::Response& res) {
    apply(svc.heatmap_overlay(req.body), res);
  });
  srv.Get(R"(/api/slides/([^/]+)/image)", [&svc](const httplib::Request& req, httplib::Response& res) {
    apply(svc.slide_image(req.matches[1]), res);
  });
  srv.Get(R"(/api/slides/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    apply(svc.slide(req.matches[1]), res);
  });
  srv.Get("/api/stats", [&svc](const httplib::Request&, httplib::Response& res) {
    apply(svc.stats(), res);
  });

  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    if (res.status == 404) {
      apply(LayoutService::error(404, "not_found", "no such endpoint"), res);
    } else if (res.status == 405) {
      apply(LayoutService::error(405, "method_not_allowed", "method not allowed"), res);
    }
  });
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::bind(const std::string& host, int port) {
  return impl_->server.bind_to_port(host, port);
}

int HttpServer::bind_any(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace slidelayout
