#pragma once

#include "motionagent/common/json_util.hpp"

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace motionagent::service {

struct TurnRecord {
    std::uint32_t turn_index = 0;
    json query;
    /// "answered" or "failed".
    std::string status;
    json answer;
    json failure;
    /// Path of the trace document relative to the session directory.
    std::string trace_ref;
    std::string trace_sha256;
};

void to_json(json& j, const TurnRecord& t);
void from_json(const json& j, TurnRecord& t);

struct SessionRecord {
    std::string session_id;
    std::string created_at;
    std::vector<TurnRecord> turns;
};

json to_json(const SessionRecord& s);

/// Points at which a test can make commit_turn stop as if the process died.
enum class CrashPoint { None, BeforeTrace, AfterTrace, MidRecord };

/// Thrown at an injected crash point. Deliberately not a motionagent::Error.
struct InjectedCrash : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Append-only layout under a root directory:
///
///   index.jsonl                        one {session_id, created_at} per session
///   sessions/<id>/session.jsonl        session record, then one line per turn
///   sessions/<id>/traces/<n>.json      trace documents
///   media/<sha256>                     uploaded media, content-addressed
///
/// A turn line is the commit point. Its trace file is written atomically
/// first, so a crash leaves either a complete turn or no turn; an orphaned
/// trace file or torn final line is ignored (and the tail repaired) on read.
class SessionStore {
public:
    /// Creates the root. Throws StorageError when it is not writable.
    explicit SessionStore(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }

    /// Throws StorageError, Conflict for an existing id.
    SessionRecord create_session(const std::string& session_id, const std::string& created_at);
    bool exists(const std::string& session_id) const;
    /// Throws SessionNotFound, StorageError.
    SessionRecord load_session(const std::string& session_id) const;
    std::vector<std::string> list_sessions() const;

    /// Writes the trace, then appends the turn line. The record's
    /// trace_ref and trace_sha256 are filled in. Throws StorageError.
    TurnRecord commit_turn(const std::string& session_id, TurnRecord turn, const std::string& trace_bytes);

    /// Persisted trace bytes. Throws SessionNotFound, TurnNotFound.
    std::string read_trace(const std::string& session_id, std::uint32_t turn_index) const;

    /// Stores bytes under media/<sha256> unless already present; returns the hash.
    std::string put_media(std::string_view bytes);

    void inject_crash(CrashPoint point) { crash_ = point; }

private:
    std::filesystem::path session_dir(const std::string& id) const;

    std::filesystem::path root_;
    CrashPoint crash_ = CrashPoint::None;
    mutable std::mutex mu_;
};

/// Deterministic session ids: the n-th id is a function of (seed, n).
class SessionIdGenerator {
public:
    explicit SessionIdGenerator(std::uint64_t seed) : seed_(seed) {}
    std::string next();
    static std::string nth(std::uint64_t seed, std::uint64_t n);

private:
    std::uint64_t seed_;
    std::uint64_t n_ = 0;
    std::mutex mu_;
};

/// Current UTC time as an ISO-8601 string.
std::string utc_timestamp();

} // namespace motionagent::service
