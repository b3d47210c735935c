#pragma once

#include "motionagent/common/json_util.hpp"

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

namespace motionagent::backends {

enum class BackendKind { Reasoner, MotionSpecialist, VideoSpecialist, Judge, Embedder };

std::string_view to_string(BackendKind k) noexcept;
BackendKind backend_kind_from_string(std::string_view s);

enum class TransportKind { Remote, Mock, Replay, Recording, Template };

std::string_view to_string(TransportKind t) noexcept;

struct BackendInfo {
    std::string model_id;
    BackendKind kind = BackendKind::Reasoner;
    TransportKind transport = TransportKind::Mock;
};

/// Outbound call to any model. `payload` carries the structured inputs
/// (media refs, candidate pairs, context entries); `schema_tag` names the
/// expected output shape and selects mock script entries.
struct ModelRequest {
    std::string role_prompt;
    json payload = json::object();
    std::string schema_tag;
};

struct ModelResponse {
    std::string text;
    json fields = json::object();
    std::chrono::milliseconds latency{0};
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
};

/// Stable hash of schema tag plus the canonical payload (sorted keys).
/// The role prompt is deliberately excluded so prompt edits do not
/// invalidate recorded cassettes.
std::string fingerprint(const ModelRequest& request);

class Backend {
public:
    explicit Backend(BackendInfo info) : info_(std::move(info)) {}
    virtual ~Backend() = default;

    Backend(const Backend&) = delete;
    Backend& operator=(const Backend&) = delete;

    const BackendInfo& info() const noexcept { return info_; }
    const std::string& model_id() const noexcept { return info_.model_id; }
    BackendKind kind() const noexcept { return info_.kind; }

    /// Errors: Timeout, TransportError, MalformedResponse, ScriptExhausted,
    /// CassetteMismatch (all as motionagent::Error).
    virtual ModelResponse invoke(const ModelRequest& request) = 0;

private:
    BackendInfo info_;
};

using BackendHandle = std::shared_ptr<Backend>;

inline ModelResponse invoke(Backend& backend, const ModelRequest& request) {
    return backend.invoke(request);
}

} // namespace motionagent::backends
