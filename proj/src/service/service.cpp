#include "motionagent/service/service.hpp"

#include "motionagent/common/error.hpp"

#include <cstdlib>

namespace motionagent::service {

ServiceOptions service_options_from(const config::EngineConfig& cfg) {
    ServiceOptions o;
    o.storage_root = cfg.storage_root;
    if (const char* env = std::getenv("STORAGE_ROOT"); env && *env) o.storage_root = env;
    o.seed = cfg.seed;
    o.media_limit_bytes = cfg.media_limit_bytes;
    if (const char* tok = std::getenv(cfg.admin_token_env.c_str()); tok) o.admin_token = tok;
    return o;
}

Service::Service(std::shared_ptr<config::Runtime> runtime, ServiceOptions options)
    : runtime_(std::move(runtime)), options_(std::move(options)), store_(options_.storage_root), ids_(options_.seed) {}

SessionRecord Service::create_session() {
    for (;;) {
        auto id = ids_.next();
        if (store_.exists(id)) continue;  // left over from an earlier run with the same seed
        try {
            return store_.create_session(id, utc_timestamp());
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Conflict) throw;
        }
    }
}

SessionRecord Service::get_session(const std::string& session_id) const { return store_.load_session(session_id); }

MediaRef Service::store_media(std::string_view bytes, const std::string& filename, std::optional<Modality> kind) {
    if (bytes.size() > options_.media_limit_bytes) {
        throw Error(ErrorCode::MediaTooLarge,
                    "media is " + std::to_string(bytes.size()) + " bytes; limit is " + std::to_string(options_.media_limit_bytes),
                    {{"size", bytes.size()}, {"limit", options_.media_limit_bytes}});
    }
    const auto modality = kind ? *kind : infer_modality_from_filename(filename);
    store_.put_media(bytes);
    return content_addressed_media(bytes, modality);
}

Service::TurnLease::TurnLease(TurnLease&& other) noexcept
    : owner_(std::exchange(other.owner_, nullptr)), session_id_(std::move(other.session_id_)) {}

Service::TurnLease::~TurnLease() {
    if (owner_) owner_->release(session_id_);
}

Service::TurnLease Service::begin_turn(const std::string& session_id) {
    if (!store_.exists(session_id)) throw Error(ErrorCode::SessionNotFound, "no session '" + session_id + "'");
    std::lock_guard lock(busy_mu_);
    if (!busy_.insert(session_id).second) {
        throw Error(ErrorCode::Conflict, "session '" + session_id + "' already has a turn in progress");
    }
    return TurnLease(this, session_id);
}

void Service::release(const std::string& session_id) {
    std::lock_guard lock(busy_mu_);
    busy_.erase(session_id);
}

agents::TurnOutcome Service::run_turn(const TurnLease& lease, UserQuery query, const agents::TurnObserver& observer) {
    const auto session = store_.load_session(lease.session_id());
    query.session_id = session.session_id;
    query.turn_index = static_cast<std::uint32_t>(session.turns.size());

    std::optional<std::pair<std::string, json>> terminal;
    auto hold_terminal = [&](const std::string& event, const json& data) {
        if (event == "answer" || event == "failure") {
            terminal.emplace(event, data);
        } else if (observer) {
            observer(event, data);
        }
    };
    auto outcome = agents::run_session_turn(query, *runtime_->engine, hold_terminal);

    TurnRecord record;
    record.turn_index = query.turn_index;
    record.query = query;
    record.status = outcome.answered() ? "answered" : "failed";
    if (outcome.answer) record.answer = *outcome.answer;
    if (outcome.failure) record.failure = outcome.failure->to_json();
    try {
        store_.commit_turn(query.session_id, std::move(record), agents::serialize_trace(outcome.trace));
    } catch (const Error& e) {
        if (observer) observer("failure", {{"code", to_string(e.code())}, {"message", e.message()}, {"rounds", outcome.trace.rounds.size()}});
        throw;
    }
    if (observer && terminal) observer(terminal->first, terminal->second);
    return outcome;
}

agents::TurnOutcome Service::post_turn(const std::string& session_id, UserQuery query,
                                       const agents::TurnObserver& observer) {
    auto lease = begin_turn(session_id);
    return run_turn(lease, std::move(query), observer);
}

std::string Service::get_trace(const std::string& session_id, std::uint32_t turn_index) const {
    return store_.read_trace(session_id, turn_index);
}

bool Service::authorized(const std::string& bearer_token) const {
    return !options_.admin_token.empty() && bearer_token == options_.admin_token;
}

json Service::list_tools() const {
    json out = json::array();
    for (const auto& [desc, enabled] : runtime_->engine->registry->list()) {
        json d = desc;
        d["enabled"] = enabled;
        out.push_back(std::move(d));
    }
    return out;
}

json Service::register_tool(const json& entry) {
    std::lock_guard lock(admin_mu_);
    config::register_catalog_entry(*runtime_, entry);
    return list_tools();
}

json Service::disable_tool(const std::string& tool_id) {
    std::lock_guard lock(admin_mu_);
    runtime_->engine->registry->set_enabled(tool_id, false);
    return list_tools();
}

} // namespace motionagent::service
