#include "motionagent/common/query.hpp"

#include "motionagent/common/error.hpp"
#include "motionagent/common/text.hpp"

namespace motionagent {

void UserQuery::validate() const {
    if (text::trim(text).empty()) throw Error(ErrorCode::InvalidArgument, "query text is empty");
}

void to_json(json& j, const UserQuery& q) {
    j = json{{"text", q.text},
             {"attachments", q.attachments},
             {"session_id", q.session_id},
             {"turn_index", q.turn_index}};
}

void from_json(const json& j, UserQuery& q) {
    q.text = j.at("text").get<std::string>();
    q.attachments = value_or(j, "attachments", std::vector<MediaRef>{});
    q.session_id = value_or(j, "session_id", std::string{});
    q.turn_index = value_or(j, "turn_index", std::uint32_t{0});
}

} // namespace motionagent
