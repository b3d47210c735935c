#pragma once

#include "motionagent/agents/engine.hpp"
#include "motionagent/backends/clock.hpp"
#include "motionagent/backends/confidence.hpp"
#include "motionagent/motioncore/tools.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace motionagent::config {

/// One model endpoint. `transport` is "template", "mock", "remote",
/// "replay" or "hash_embedder"; `options` holds the transport's fields.
struct BackendSpec {
    std::string id;
    backends::BackendKind kind = backends::BackendKind::Reasoner;
    std::string transport;
    json options = json::object();
};

/// Backend ids per engine role; empty means the role is unfilled.
struct Roles {
    std::string planner;
    std::string verifier;
    std::string selector;
    std::string generator;
    std::string aggregator;
    std::string specialist;
    std::vector<std::string> analyzers;
    std::string embedder;
    std::string judge;
};

struct EngineConfig {
    std::filesystem::path base_dir;
    json document;
    /// SHA-256 of the canonical document.
    std::string config_hash;

    std::uint64_t seed = 0;
    int round_budget = 3;
    std::filesystem::path storage_root = "storage";
    std::uint64_t media_limit_bytes = 64ULL << 20;
    std::string admin_token_env = "ADMIN_TOKEN";
    std::string rubric_version = "v1";
    std::chrono::milliseconds deadline{30000};
    size_t quorum = 1;
    motioncore::AggregationMethod aggregation = motioncore::AggregationMethod::ConfidenceMechanism;
    backends::ConfidenceTable confidence;
    PromptSet prompts;
    std::optional<std::filesystem::path> knowledge_base;
    std::optional<std::filesystem::path> motion_store;
    size_t retrieve_k = 3;
    size_t knowledge_k = 2;
    std::vector<BackendSpec> backends;
    Roles roles;
    /// Explicit catalog entries; null selects every available builtin.
    json catalog;
};

/// Parses and validates a config document. Relative paths resolve against
/// `base_dir`. Throws ConfigInvalid whose detail lists every issue found.
EngineConfig parse_config(const json& document, const std::filesystem::path& base_dir);

/// Reads a JSON config file; see parse_config.
EngineConfig load_config(const std::filesystem::path& path);

struct RuntimeOptions {
    /// Wrap every backend in a recorder writing `<dir>/<backend id>.jsonl`.
    std::optional<std::filesystem::path> record_dir;
    backends::ClockHandle clock = backends::real_clock();
};

/// A ready-to-run engine plus the pieces around it.
struct Runtime {
    EngineConfig config;
    std::shared_ptr<agents::Engine> engine;
    std::shared_ptr<const motioncore::MotionCoreSettings> settings;
    std::map<std::string, backends::BackendHandle> backends;
    backends::BackendHandle judge;

    /// [{id, kind, transport}] sorted by id, as configured.
    json backend_summary() const;
    /// Run metadata for benchmark reports.
    json bench_metadata() const;
};

/// Builds backends, fills roles and registers the catalog. Throws
/// ConfigInvalid when a backend cannot be constructed.
Runtime build_runtime(const EngineConfig& config, const RuntimeOptions& options = {});

/// Adds one catalog entry at runtime:
///   {"builtin": name, "tool_id"?, "enabled"?}  or
///   {"tool_id", "capabilities", "description", "backend", "enabled"?}
/// Throws DuplicateToolId, ConfigInvalid.
void register_catalog_entry(Runtime& runtime, const json& entry);

} // namespace motionagent::config
