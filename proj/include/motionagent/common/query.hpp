#pragma once

#include "motionagent/common/media.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace motionagent {

struct UserQuery {
    std::string text;
    std::vector<MediaRef> attachments;
    std::string session_id;
    std::uint32_t turn_index = 0;

    /// Throws InvalidArgument when the text is blank after trimming.
    void validate() const;
};

void to_json(json& j, const UserQuery& q);
void from_json(const json& j, UserQuery& q);

} // namespace motionagent
