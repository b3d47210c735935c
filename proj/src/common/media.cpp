#include "motionagent/common/media.hpp"

#include "motionagent/common/error.hpp"
#include "motionagent/common/hash.hpp"
#include "motionagent/common/text.hpp"

#include <array>

namespace motionagent {

std::string_view to_string(Modality m) noexcept {
    switch (m) {
        case Modality::Motion: return "motion";
        case Modality::Video: return "video";
        case Modality::MotionVideo: return "motion_video";
    }
    return "motion";
}

Modality modality_from_string(std::string_view s) {
    const auto v = text::to_lower(s);
    if (v == "motion") return Modality::Motion;
    if (v == "video") return Modality::Video;
    if (v == "motion_video" || v == "motion-video" || v == "both") return Modality::MotionVideo;
    throw Error(ErrorCode::InvalidArgument, "unknown modality '" + std::string(s) + "'");
}

Modality MediaRef::modality() const {
    if (motion_uri && video_uri) return Modality::MotionVideo;
    if (video_uri) return Modality::Video;
    if (motion_uri) return Modality::Motion;
    throw Error(ErrorCode::InvalidArgument, "media '" + id + "' has neither motion nor video");
}

void to_json(json& j, const MediaRef& m) {
    j = json{{"id", m.id}};
    if (m.motion_uri) j["motion"] = *m.motion_uri;
    if (m.video_uri) j["video"] = *m.video_uri;
}

void from_json(const json& j, MediaRef& m) {
    m.id = j.at("id").get<std::string>();
    m.motion_uri.reset();
    m.video_uri.reset();
    if (auto it = j.find("motion"); it != j.end() && !it->is_null()) m.motion_uri = it->get<std::string>();
    if (auto it = j.find("video"); it != j.end() && !it->is_null()) m.video_uri = it->get<std::string>();
    if (m.id.empty()) throw Error(ErrorCode::InvalidArgument, "media ref without id");
    if (m.empty()) throw Error(ErrorCode::InvalidArgument, "media '" + m.id + "' has neither motion nor video");
}

Modality infer_modality_from_filename(std::string_view filename) {
    static constexpr std::array<std::string_view, 6> kVideo = {".mp4", ".avi", ".mov", ".mkv", ".webm", ".m4v"};
    const auto lower = text::to_lower(filename);
    for (auto ext : kVideo) {
        if (lower.size() >= ext.size() && lower.compare(lower.size() - ext.size(), ext.size(), ext) == 0) {
            return Modality::Video;
        }
    }
    return Modality::Motion;
}

MediaRef content_addressed_media(std::string_view bytes, Modality modality) {
    MediaRef ref;
    ref.id = sha256_hex(bytes);
    const std::string uri = "media/" + ref.id;
    if (modality != Modality::Video) ref.motion_uri = uri;
    if (modality != Modality::Motion) ref.video_uri = uri;
    return ref;
}

std::optional<Modality> combined_modality(const std::vector<MediaRef>& media) {
    bool motion = false;
    bool video = false;
    for (const auto& m : media) {
        motion = motion || m.motion_uri.has_value();
        video = video || m.video_uri.has_value();
    }
    if (motion && video) return Modality::MotionVideo;
    if (video) return Modality::Video;
    if (motion) return Modality::Motion;
    return std::nullopt;
}

} // namespace motionagent
