#pragma once

#include "motionagent/common/json_util.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace motionagent {

enum class Modality { Motion, Video, MotionVideo };

std::string_view to_string(Modality m) noexcept;
Modality modality_from_string(std::string_view s);

/// Reference to a motion sequence, a video, or a paired recording of both.
/// Identity is `id`; the URIs are opaque to the engine.
struct MediaRef {
    std::string id;
    std::optional<std::string> motion_uri;
    std::optional<std::string> video_uri;

    Modality modality() const;
    bool empty() const { return !motion_uri && !video_uri; }

    friend bool operator==(const MediaRef&, const MediaRef&) = default;
};

void to_json(json& j, const MediaRef& m);
void from_json(const json& j, MediaRef& m);

/// "video" for common container extensions, "motion" otherwise.
Modality infer_modality_from_filename(std::string_view filename);

/// Content-addressed reference: id is the SHA-256 of the bytes and the URI
/// is the logical location under a storage root ("media/<hash>").
MediaRef content_addressed_media(std::string_view bytes, Modality modality);

/// Modality spanned by a set of attachments.
std::optional<Modality> combined_modality(const std::vector<MediaRef>& media);

} // namespace motionagent
