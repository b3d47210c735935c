#include "motionagent/service/store.hpp"

#include "motionagent/common/error.hpp"
#include "motionagent/common/hash.hpp"

#include <cerrno>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <regex>

#include <fcntl.h>
#include <unistd.h>

namespace motionagent::service {

namespace fs = std::filesystem;

void to_json(json& j, const TurnRecord& t) {
    j = json{{"type", "turn"},
             {"turn_index", t.turn_index},
             {"query", t.query},
             {"status", t.status},
             {"answer", t.answer},
             {"failure", t.failure},
             {"trace", t.trace_ref},
             {"trace_sha256", t.trace_sha256}};
}

void from_json(const json& j, TurnRecord& t) {
    t.turn_index = j.at("turn_index").get<std::uint32_t>();
    t.query = j.value("query", json());
    t.status = j.at("status").get<std::string>();
    t.answer = j.value("answer", json());
    t.failure = j.value("failure", json());
    t.trace_ref = j.at("trace").get<std::string>();
    t.trace_sha256 = j.value("trace_sha256", std::string());
}

json to_json(const SessionRecord& s) {
    json turns = json::array();
    for (const auto& t : s.turns) {
        json tj = t;
        tj.erase("type");
        turns.push_back(std::move(tj));
    }
    return {{"session_id", s.session_id}, {"created_at", s.created_at}, {"turns", std::move(turns)}};
}

namespace {

bool valid_id(const std::string& id) {
    static const std::regex kId("^[A-Za-z0-9_-]{1,128}$");
    return std::regex_match(id, kId);
}

[[noreturn]] void storage_error(const std::string& what, const fs::path& p) {
    throw Error(ErrorCode::StorageError, what + ": " + p.string(), {{"path", p.string()}});
}

void append_bytes(const fs::path& path, std::string_view bytes) {
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) storage_error("cannot open for append", path);
    size_t off = 0;
    while (off < bytes.size()) {
        const ssize_t n = ::write(fd, bytes.data() + off, bytes.size() - off);
        if (n < 0) {
            ::close(fd);
            storage_error("append failed", path);
        }
        off += static_cast<size_t>(n);
    }
    ::fsync(fd);
    ::close(fd);
}

struct ParsedLog {
    json session;
    std::vector<TurnRecord> turns;
    /// Bytes up to the end of the last complete line.
    size_t good_bytes = 0;
    size_t total_bytes = 0;
};

ParsedLog parse_log(const fs::path& path) {
    std::string body;
    try {
        body = read_file(path);
    } catch (const std::exception&) {
        storage_error("cannot read session log", path);
    }
    ParsedLog log;
    log.total_bytes = body.size();
    size_t start = 0;
    while (start < body.size()) {
        const auto nl = body.find('\n', start);
        if (nl == std::string::npos) break;  // torn tail: never committed
        auto line = json::parse(body.begin() + static_cast<std::ptrdiff_t>(start),
                                body.begin() + static_cast<std::ptrdiff_t>(nl), nullptr, false);
        if (line.is_discarded() || !line.is_object()) storage_error("corrupt session log", path);
        if (log.session.is_null()) {
            log.session = line;
        } else {
            try {
                log.turns.push_back(line.get<TurnRecord>());
            } catch (const json::exception&) {
                storage_error("corrupt turn record", path);
            }
        }
        start = nl + 1;
        log.good_bytes = start;
    }
    if (log.session.is_null()) storage_error("session log has no header", path);
    return log;
}

} // namespace

SessionStore::SessionStore(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_ / "sessions", ec);
    if (!ec) fs::create_directories(root_ / "media", ec);
    if (ec) storage_error("cannot create storage root", root_);
    const auto probe = root_ / ".probe";
    const int fd = ::open(probe.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) storage_error("storage root is not writable", root_);
    ::close(fd);
    fs::remove(probe, ec);
}

fs::path SessionStore::session_dir(const std::string& id) const { return root_ / "sessions" / id; }

SessionRecord SessionStore::create_session(const std::string& session_id, const std::string& created_at) {
    if (!valid_id(session_id)) throw Error(ErrorCode::InvalidArgument, "invalid session id '" + session_id + "'");
    std::lock_guard lock(mu_);
    const auto dir = session_dir(session_id);
    if (fs::exists(dir / "session.jsonl")) throw Error(ErrorCode::Conflict, "session '" + session_id + "' exists");
    std::error_code ec;
    fs::create_directories(dir / "traces", ec);
    if (ec) storage_error("cannot create session directory", dir);
    const json header{{"type", "session"}, {"session_id", session_id}, {"created_at", created_at}};
    try {
        write_file_atomic(dir / "session.jsonl", header.dump() + "\n");
    } catch (const std::exception&) {
        storage_error("cannot write session log", dir / "session.jsonl");
    }
    append_bytes(root_ / "index.jsonl", json{{"session_id", session_id}, {"created_at", created_at}}.dump() + "\n");
    return {session_id, created_at, {}};
}

bool SessionStore::exists(const std::string& session_id) const {
    return valid_id(session_id) && fs::exists(session_dir(session_id) / "session.jsonl");
}

SessionRecord SessionStore::load_session(const std::string& session_id) const {
    if (!exists(session_id)) throw Error(ErrorCode::SessionNotFound, "no session '" + session_id + "'");
    std::lock_guard lock(mu_);
    auto log = parse_log(session_dir(session_id) / "session.jsonl");
    return {session_id, log.session.value("created_at", std::string()), std::move(log.turns)};
}

std::vector<std::string> SessionStore::list_sessions() const {
    std::vector<std::string> out;
    const auto index = root_ / "index.jsonl";
    if (!fs::exists(index)) return out;
    for_each_jsonl(
        index,
        [&](size_t, const json& j) {
            const auto id = j.value("session_id", std::string());
            if (exists(id)) out.push_back(id);
        },
        [](size_t, const std::string&) {});
    return out;
}

TurnRecord SessionStore::commit_turn(const std::string& session_id, TurnRecord turn, const std::string& trace_bytes) {
    if (!exists(session_id)) throw Error(ErrorCode::SessionNotFound, "no session '" + session_id + "'");
    std::lock_guard lock(mu_);
    const auto dir = session_dir(session_id);
    const auto log_path = dir / "session.jsonl";
    auto log = parse_log(log_path);
    if (log.good_bytes != log.total_bytes) {
        std::error_code ec;
        fs::resize_file(log_path, log.good_bytes, ec);
        if (ec) storage_error("cannot repair torn session log", log_path);
    }
    if (turn.turn_index != log.turns.size()) {
        throw Error(ErrorCode::Conflict, "turn index " + std::to_string(turn.turn_index) + " is not next (" +
                                             std::to_string(log.turns.size()) + ")");
    }

    const auto point = crash_;
    crash_ = CrashPoint::None;

    turn.trace_ref = "traces/" + std::to_string(turn.turn_index) + ".json";
    turn.trace_sha256 = sha256_hex(trace_bytes);
    if (point == CrashPoint::BeforeTrace) throw InjectedCrash("crash before trace write");
    std::error_code ec;
    fs::create_directories(dir / "traces", ec);
    try {
        write_file_atomic(dir / turn.trace_ref, trace_bytes);
    } catch (const std::exception&) {
        storage_error("cannot write trace", dir / turn.trace_ref);
    }
    if (point == CrashPoint::AfterTrace) throw InjectedCrash("crash after trace write");

    const auto line = json(turn).dump() + "\n";
    if (point == CrashPoint::MidRecord) {
        append_bytes(log_path, std::string_view(line).substr(0, line.size() / 2));
        throw InjectedCrash("crash while appending the turn record");
    }
    append_bytes(log_path, line);
    return turn;
}

std::string SessionStore::read_trace(const std::string& session_id, std::uint32_t turn_index) const {
    const auto session = load_session(session_id);
    if (turn_index >= session.turns.size()) {
        throw Error(ErrorCode::TurnNotFound, "session '" + session_id + "' has no turn " + std::to_string(turn_index),
                    {{"turns", session.turns.size()}});
    }
    const auto& turn = session.turns[turn_index];
    const auto path = session_dir(session_id) / turn.trace_ref;
    std::string bytes;
    try {
        bytes = read_file(path);
    } catch (const std::exception&) {
        storage_error("cannot read trace", path);
    }
    if (!turn.trace_sha256.empty() && sha256_hex(bytes) != turn.trace_sha256) storage_error("trace checksum mismatch", path);
    return bytes;
}

std::string SessionStore::put_media(std::string_view bytes) {
    const auto hash = sha256_hex(bytes);
    const auto path = root_ / "media" / hash;
    std::lock_guard lock(mu_);
    if (!fs::exists(path)) {
        try {
            write_file_atomic(path, bytes);
        } catch (const std::exception&) {
            storage_error("cannot write media", path);
        }
    }
    return hash;
}

std::string SessionIdGenerator::nth(std::uint64_t seed, std::uint64_t n) {
    std::uint64_t state = seed ^ (0x9e3779b97f4a7c15ULL * (n + 1));
    const auto v = splitmix64(state);
    char buf[24];
    std::snprintf(buf, sizeof buf, "s-%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string SessionIdGenerator::next() {
    std::lock_guard lock(mu_);
    return nth(seed_, n_++);
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const auto t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    ::gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace motionagent::service
