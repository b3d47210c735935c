#pragma once

#include "motionagent/common/error.hpp"
#include "motionagent/service/service.hpp"

#include <memory>
#include <string>

namespace motionagent::service {

/// HTTP status for an error code: 404 for missing sessions and turns, 413
/// for oversized media, 401 unauthorized, 409 conflicts, 500 storage
/// failures, 400 for everything else.
int http_status(ErrorCode code) noexcept;

/// One server-sent event frame: "event: <name>\ndata: <json>\n\n".
std::string sse_frame(const std::string& event, const json& data);

/// Routes:
///   POST   /sessions
///   GET    /sessions/{id}
///   POST   /sessions/{id}/turns            multipart (query JSON + media) or JSON; SSE reply
///   GET    /sessions/{id}/turns/{n}/trace
///   GET    /healthz
///   GET    /admin/tools                    Authorization: Bearer <token>
///   POST   /admin/tools
///   DELETE /admin/tools/{tool_id}
class HttpServer {
public:
    explicit HttpServer(std::shared_ptr<Service> service);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds; port 0 picks a free one. Returns the bound port or throws
    /// InvalidArgument.
    int bind(const std::string& host, int port);
    /// Serves until stop(); call after bind().
    void listen();
    /// bind + listen on a background thread; returns once ready.
    int start(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace motionagent::service
