#include "motionagent/backends/backend.hpp"

#include "motionagent/common/error.hpp"
#include "motionagent/common/hash.hpp"
#include "motionagent/common/text.hpp"

namespace motionagent::backends {

std::string_view to_string(BackendKind k) noexcept {
    switch (k) {
        case BackendKind::Reasoner: return "reasoner";
        case BackendKind::MotionSpecialist: return "motion_specialist";
        case BackendKind::VideoSpecialist: return "video_specialist";
        case BackendKind::Judge: return "judge";
        case BackendKind::Embedder: return "embedder";
    }
    return "reasoner";
}

BackendKind backend_kind_from_string(std::string_view s) {
    const auto v = text::to_lower(s);
    if (v == "reasoner") return BackendKind::Reasoner;
    if (v == "motion_specialist") return BackendKind::MotionSpecialist;
    if (v == "video_specialist") return BackendKind::VideoSpecialist;
    if (v == "judge") return BackendKind::Judge;
    if (v == "embedder") return BackendKind::Embedder;
    throw Error(ErrorCode::InvalidArgument, "unknown backend kind '" + std::string(s) + "'");
}

std::string_view to_string(TransportKind t) noexcept {
    switch (t) {
        case TransportKind::Remote: return "remote";
        case TransportKind::Mock: return "mock";
        case TransportKind::Replay: return "replay";
        case TransportKind::Recording: return "recording";
        case TransportKind::Template: return "template";
    }
    return "mock";
}

namespace {

bool is_media_ref(const json& j) {
    if (!j.is_object() || !j.contains("id")) return false;
    if (!j.contains("motion") && !j.contains("video")) return false;
    for (const auto& [key, _] : j.items()) {
        if (key != "id" && key != "motion" && key != "video") return false;
    }
    return true;
}

// Media refs collapse to their id so storage relocation keeps fingerprints.
json canonicalize(const json& j) {
    if (is_media_ref(j)) return "media:" + j.at("id").get<std::string>();
    if (j.is_object()) {
        json out = json::object();
        for (const auto& [key, value] : j.items()) out[key] = canonicalize(value);
        return out;
    }
    if (j.is_array()) {
        json out = json::array();
        for (const auto& value : j) out.push_back(canonicalize(value));
        return out;
    }
    return j;
}

} // namespace

std::string fingerprint(const ModelRequest& request) {
    return sha256_hex(request.schema_tag + "\n" + canonical_dump(canonicalize(request.payload)));
}

} // namespace motionagent::backends
