#pragma once

#include "motionagent/backends/backend.hpp"

namespace motionagent::backends {

struct RemoteEndpoint {
    /// scheme://host[:port]/path, e.g. http://127.0.0.1:8000/v1/chat/completions
    std::string url;
    /// Name of the environment variable holding the bearer token; empty for none.
    std::string auth_env;
    std::chrono::milliseconds timeout{30000};
};

/// JSON-over-HTTP model client. Request body:
///   {"model", "schema", "messages": [{"role","content"}...], "media": <refs>}
/// Response text is read from choices[0].message.content; an optional
/// top-level "fields" object carries structured output and "usage" the
/// token counters.
///
/// One retry on transient transport failure (connection error, HTTP 429 or
/// 5xx); none on timeout.
class RemoteBackend final : public Backend {
public:
    RemoteBackend(std::string model_id, BackendKind kind, RemoteEndpoint endpoint);

    ModelResponse invoke(const ModelRequest& request) override;

    static json build_body(const std::string& model_id, const ModelRequest& request);
    static ModelResponse parse_body(const std::string& body);

private:
    RemoteEndpoint endpoint_;
    std::string scheme_host_port_;
    std::string path_;
    std::string token_;
};

} // namespace motionagent::backends
