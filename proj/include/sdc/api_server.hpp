#pragma once

// cpp-httplib adapter for sdc::api::Service. Requests run on httplib's
// worker pool; the service itself holds no mutable state.

#include <httplib.h>

#include <string>

#include "sdc/api.hpp"

namespace sdc::api {

struct ServerOptions {
  std::string host = "0.0.0.0";
  int port = 8080;
  std::string static_dir;          // built explorer UI, served at "/" when set
  std::string cors_origin = "*";
};

inline void install_routes(httplib::Server& svr, const Service& service, const ServerOptions& opt) {
  svr.set_default_headers({{"Access-Control-Allow-Origin", opt.cors_origin},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    const auto r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  svr.Get(R"(/api/.*)", forward);
  svr.Post(R"(/api/.*)", forward);
  svr.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  if (!opt.static_dir.empty()) svr.set_mount_point("/", opt.static_dir);
  svr.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    res.set_content(Json{{"errors", Json::array({Json{{"path", req.path}, {"message", "no such endpoint"}}})}}.dump(),
                    "application/json");
  });
}

// Blocks until the server stops. Returns false if the socket cannot be bound.
inline bool serve(const Service& service, const ServerOptions& opt) {
  httplib::Server svr;
  install_routes(svr, service, opt);
  return svr.listen(opt.host, opt.port);
}

}  // namespace sdc::api
