#pragma once

#include "motionagent/agents/engine.hpp"
#include "motionagent/config/engine_config.hpp"
#include "motionagent/service/store.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <set>

namespace motionagent::service {

struct ServiceOptions {
    std::filesystem::path storage_root;
    std::uint64_t seed = 0;
    std::uint64_t media_limit_bytes = 64ULL << 20;
    /// Static bearer token for /admin; empty disables admin access.
    std::string admin_token;
};

/// Options from a loaded config: STORAGE_ROOT overrides the storage root,
/// the admin token is read from the configured environment variable.
ServiceOptions service_options_from(const config::EngineConfig& cfg);

/// Transport-independent service core. Sessions, turns, traces and tool
/// administration; the HTTP layer only translates.
class Service {
public:
    Service(std::shared_ptr<config::Runtime> runtime, ServiceOptions options);

    /// Throws StorageError.
    SessionRecord create_session();
    /// Throws SessionNotFound.
    SessionRecord get_session(const std::string& session_id) const;

    /// Content-addressed upload. Modality from `kind` if given, else from
    /// the filename. Throws MediaTooLarge, StorageError.
    MediaRef store_media(std::string_view bytes, const std::string& filename, std::optional<Modality> kind = std::nullopt);

    /// Marks a session busy for the lifetime of the lease.
    class TurnLease {
    public:
        TurnLease(TurnLease&& other) noexcept;
        TurnLease& operator=(TurnLease&&) = delete;
        ~TurnLease();
        const std::string& session_id() const noexcept { return session_id_; }

    private:
        friend class Service;
        TurnLease(Service* owner, std::string id) : owner_(owner), session_id_(std::move(id)) {}
        Service* owner_;
        std::string session_id_;
    };

    /// Throws SessionNotFound, or Conflict while another turn is running.
    TurnLease begin_turn(const std::string& session_id);

    /// Runs the turn and persists it before emitting the terminal event.
    /// The query's session id and turn index are assigned here.
    agents::TurnOutcome run_turn(const TurnLease& lease, UserQuery query, const agents::TurnObserver& observer = {});

    agents::TurnOutcome post_turn(const std::string& session_id, UserQuery query,
                                  const agents::TurnObserver& observer = {});

    /// Throws SessionNotFound, TurnNotFound.
    std::string get_trace(const std::string& session_id, std::uint32_t turn_index) const;

    bool authorized(const std::string& bearer_token) const;
    json list_tools() const;
    /// Throws DuplicateToolId, ConfigInvalid.
    json register_tool(const json& entry);
    /// Throws UnknownTool.
    json disable_tool(const std::string& tool_id);

    SessionStore& store() noexcept { return store_; }
    const ServiceOptions& options() const noexcept { return options_; }

private:
    void release(const std::string& session_id);

    std::shared_ptr<config::Runtime> runtime_;
    ServiceOptions options_;
    SessionStore store_;
    SessionIdGenerator ids_;
    std::mutex busy_mu_;
    std::set<std::string> busy_;
    std::mutex admin_mu_;
};

} // namespace motionagent::service
