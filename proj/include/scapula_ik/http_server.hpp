#pragma once
// HTTP binding of the service API (cpp-httplib). Requests only read the
// shared context, so the server's worker threads need no locking.

#include <string>

#include <httplib.h>

#include "scapula_ik/service.hpp"

namespace scapula_ik {

inline void install_routes(httplib::Server& server, const ServiceContext& ctx) {
  server.Get(R"(/api/.*)", [&ctx](const httplib::Request& req, httplib::Response& res) {
    QueryParams params;
    for (const auto& [key, value] : req.params) params.emplace(key, value);  // first occurrence wins
    const ApiResponse r = handle_api(ctx, req.path, params);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  });
  server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    const json body{{"error", res.status == 404 ? "unknown path '" + req.path + "'" : "request failed"}};
    res.set_content(body.dump(), "application/json");
  });
  // The pose viewer is served from a different origin during development.
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
}

}  // namespace scapula_ik
