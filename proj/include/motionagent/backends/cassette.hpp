#pragma once

#include "motionagent/backends/backend.hpp"

#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>

namespace motionagent::backends {

/// One JSONL line of a cassette file.
struct CassetteEntry {
    std::string fingerprint;
    std::string schema_tag;
    std::string response_text;
    json structured_fields = json::object();
    std::int64_t latency_ms = 0;
};

void to_json(json& j, const CassetteEntry& e);
void from_json(const json& j, CassetteEntry& e);

std::vector<CassetteEntry> load_cassette(const std::filesystem::path& path);

/// Pass-through wrapper that appends every successful call to a cassette.
/// Failed calls are not recorded: a replay can only reproduce responses.
class RecordingBackend final : public Backend {
public:
    RecordingBackend(BackendHandle inner, const std::filesystem::path& sink);

    ModelResponse invoke(const ModelRequest& request) override;
    const BackendHandle& inner() const noexcept { return inner_; }

private:
    BackendHandle inner_;
    std::mutex mu_;
    std::ofstream out_;
};

/// Serves recorded responses by request fingerprint, in recorded order for
/// repeated fingerprints. An unknown or exhausted fingerprint is a
/// CassetteMismatch: the code under test drifted from the recording.
class ReplayBackend final : public Backend {
public:
    ReplayBackend(std::string model_id, BackendKind kind, const std::filesystem::path& cassette);

    ModelResponse invoke(const ModelRequest& request) override;
    size_t remaining() const;

private:
    mutable std::mutex mu_;
    std::map<std::string, std::deque<CassetteEntry>> by_fingerprint_;
    std::filesystem::path path_;
};

/// Errors: SinkUnwritable; PreconditionViolation when `backend` is itself a
/// replay or recording wrapper.
BackendHandle record_cassette(BackendHandle backend, const std::filesystem::path& sink);

} // namespace motionagent::backends
