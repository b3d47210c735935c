#include "motionagent/config/engine_config.hpp"

#include "motionagent/agents/template_reasoner.hpp"
#include "motionagent/backends/cassette.hpp"
#include "motionagent/backends/hash_embedder.hpp"
#include "motionagent/backends/mock_backend.hpp"
#include "motionagent/backends/remote_backend.hpp"
#include "motionagent/bench/judge.hpp"
#include "motionagent/common/error.hpp"
#include "motionagent/common/hash.hpp"
#include "motionagent/common/text.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

namespace motionagent::config {

namespace fs = std::filesystem;
using backends::BackendHandle;
using backends::BackendKind;

namespace {

const std::set<std::string> kTopLevel = {
    "description", "seed", "round_budget", "storage_root", "media_limit_bytes", "admin_token_env",
    "rubric_version", "fan_out", "aggregation", "confidence_table", "prompts", "knowledge_base",
    "motion_store", "retrieve_k", "knowledge_k", "backends", "roles", "catalog"};

const std::set<std::string> kTransports = {"template", "mock", "remote", "replay", "hash_embedder"};

class Issues {
public:
    void add(std::string msg) { list_.push_back(std::move(msg)); }
    bool empty() const { return list_.empty(); }
    const std::vector<std::string>& list() const { return list_; }

    /// Runs `fn`, turning any error into an issue prefixed with `where`.
    template <typename Fn>
    void guard(const std::string& where, Fn&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            add(where + ": " + e.message());
        } catch (const json::exception& e) {
            add(where + ": " + e.what());
        }
    }

private:
    std::vector<std::string> list_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

template <typename T>
T get_field(const json& doc, const char* key, T fallback, Issues& issues, const char* type_name) {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        issues.add(std::string(key) + " must be " + type_name);
        return fallback;
    }
}

std::int64_t get_int(const json& doc, const char* key, std::int64_t fallback, std::int64_t min, Issues& issues) {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) return fallback;
    if (!it->is_number_integer()) {
        issues.add(std::string(key) + " must be an integer");
        return fallback;
    }
    const auto v = it->get<std::int64_t>();
    if (v < min) {
        issues.add(std::string(key) + " must be >= " + std::to_string(min));
        return fallback;
    }
    return v;
}

void check_backend(const BackendSpec& b, const fs::path& base, Issues& issues) {
    const auto where = "backend '" + b.id + "'";
    if (b.transport == "template") {
        if (b.kind != BackendKind::Reasoner && b.kind != BackendKind::Judge) {
            issues.add(where + ": the template transport serves reasoner and judge kinds only");
        }
    } else if (b.transport == "mock") {
        issues.guard(where, [&] {
            if (!b.options.contains("responses") || !b.options["responses"].is_object()) {
                throw Error(ErrorCode::ConfigInvalid, "mock transport needs a 'responses' object");
            }
            backends::mock_script_from_json(b.options);
        });
    } else if (b.transport == "remote") {
        const auto endpoint = value_or<std::string>(b.options, "endpoint", "");
        if (endpoint.empty()) issues.add(where + ": remote transport needs an 'endpoint'");
        const auto env = value_or<std::string>(b.options, "auth_env", "");
        if (!env.empty() && !std::getenv(env.c_str())) {
            issues.add(where + ": environment variable " + env + " is not set");
        }
        if (value_or<std::int64_t>(b.options, "timeout_ms", 30000) <= 0) issues.add(where + ": timeout_ms must be positive");
    } else if (b.transport == "replay") {
        const auto cassette = value_or<std::string>(b.options, "cassette", "");
        if (cassette.empty()) {
            issues.add(where + ": replay transport needs a 'cassette'");
        } else if (!fs::is_regular_file(resolve(base, cassette))) {
            issues.add(where + ": cassette not found: " + resolve(base, cassette).string());
        }
    } else if (b.transport == "hash_embedder") {
        if (b.kind != BackendKind::Embedder) issues.add(where + ": hash_embedder must have kind 'embedder'");
        if (value_or<std::int64_t>(b.options, "dimension", 0) <= 0) issues.add(where + ": dimension must be positive");
    }
}

} // namespace

EngineConfig parse_config(const json& doc, const fs::path& base_dir) {
    if (!doc.is_object()) throw Error(ErrorCode::ConfigInvalid, "config must be a JSON object");
    Issues issues;
    EngineConfig cfg;
    cfg.base_dir = base_dir;
    cfg.document = doc;
    cfg.config_hash = sha256_hex(canonical_dump(doc));

    for (const auto& [key, _] : doc.items()) {
        if (!kTopLevel.count(key)) issues.add("unknown key '" + key + "'");
    }

    cfg.seed = static_cast<std::uint64_t>(get_int(doc, "seed", 0, 0, issues));
    cfg.round_budget = static_cast<int>(get_int(doc, "round_budget", 3, 1, issues));
    cfg.storage_root = resolve(base_dir, get_field<std::string>(doc, "storage_root", "storage", issues, "a string"));
    cfg.media_limit_bytes = static_cast<std::uint64_t>(get_int(doc, "media_limit_bytes", 64LL << 20, 1, issues));
    cfg.admin_token_env = get_field<std::string>(doc, "admin_token_env", "ADMIN_TOKEN", issues, "a string");
    cfg.rubric_version = get_field<std::string>(doc, "rubric_version", "v1", issues, "a string");
    cfg.retrieve_k = static_cast<size_t>(get_int(doc, "retrieve_k", 3, 1, issues));
    cfg.knowledge_k = static_cast<size_t>(get_int(doc, "knowledge_k", 2, 1, issues));

    if (auto fo = doc.find("fan_out"); fo != doc.end() && !fo->is_null()) {
        if (!fo->is_object()) {
            issues.add("fan_out must be an object");
        } else {
            cfg.deadline = std::chrono::milliseconds(get_int(*fo, "deadline_ms", 30000, 1, issues));
            cfg.quorum = static_cast<size_t>(get_int(*fo, "quorum", 1, 1, issues));
        }
    }

    const auto agg = get_field<std::string>(doc, "aggregation", "confidence", issues, "a string");
    if (agg == "confidence") {
        cfg.aggregation = motioncore::AggregationMethod::ConfidenceMechanism;
    } else if (agg == "motion_aware") {
        cfg.aggregation = motioncore::AggregationMethod::MotionAware;
    } else {
        issues.add("aggregation must be 'confidence' or 'motion_aware'");
    }

    if (doc.contains("confidence_table")) {
        issues.guard("confidence_table", [&] { cfg.confidence = backends::confidence_table_from_json(doc["confidence_table"]); });
    }
    if (doc.contains("prompts")) issues.guard("prompts", [&] { cfg.prompts = prompt_set_from_json(doc["prompts"]); });

    for (const char* key : {"knowledge_base", "motion_store"}) {
        const auto p = get_field<std::string>(doc, key, "", issues, "a path string");
        if (p.empty()) continue;
        const auto path = resolve(base_dir, p);
        if (!fs::exists(path)) issues.add(std::string(key) + " not found: " + path.string());
        (std::string(key) == "knowledge_base" ? cfg.knowledge_base : cfg.motion_store) = path;
    }

    std::map<std::string, BackendKind> kinds;
    if (auto bs = doc.find("backends"); bs == doc.end() || !bs->is_array() || bs->empty()) {
        issues.add("backends must be a non-empty list");
    } else {
        for (size_t i = 0; i < bs->size(); ++i) {
            const auto& b = (*bs)[i];
            const auto where = "backends[" + std::to_string(i) + "]";
            if (!b.is_object()) {
                issues.add(where + " must be an object");
                continue;
            }
            BackendSpec spec;
            spec.options = b;
            spec.id = value_or<std::string>(b, "id", "");
            spec.transport = value_or<std::string>(b, "transport", "");
            if (spec.id.empty()) {
                issues.add(where + ": missing id");
                continue;
            }
            if (kinds.count(spec.id)) {
                issues.add(where + ": duplicate backend id '" + spec.id + "'");
                continue;
            }
            bool ok = true;
            try {
                spec.kind = backends::backend_kind_from_string(value_or<std::string>(b, "kind", ""));
            } catch (const Error& e) {
                issues.add("backend '" + spec.id + "': " + e.message());
                ok = false;
            }
            if (!kTransports.count(spec.transport)) {
                issues.add("backend '" + spec.id + "': unknown transport '" + spec.transport + "'");
                ok = false;
            }
            if (!ok) continue;
            check_backend(spec, base_dir, issues);
            kinds[spec.id] = spec.kind;
            cfg.backends.push_back(std::move(spec));
        }
    }

    const json roles = doc.value("roles", json::object());
    if (!roles.is_object()) issues.add("roles must be an object");
    auto role = [&](const char* name, bool required) {
        const auto id = roles.is_object() ? value_or<std::string>(roles, name, "") : std::string();
        if (id.empty()) {
            if (required) issues.add(std::string("roles.") + name + " is required");
        } else if (!kinds.count(id)) {
            issues.add(std::string("roles.") + name + " refers to unknown backend '" + id + "'");
        }
        return id;
    };
    cfg.roles.planner = role("planner", true);
    cfg.roles.verifier = role("verifier", false);
    cfg.roles.selector = role("selector", false);
    cfg.roles.generator = role("generator", false);
    cfg.roles.aggregator = role("aggregator", cfg.aggregation == motioncore::AggregationMethod::MotionAware);
    cfg.roles.specialist = role("specialist", cfg.aggregation == motioncore::AggregationMethod::MotionAware);
    cfg.roles.embedder = role("embedder", false);
    cfg.roles.judge = role("judge", false);
    if (roles.is_object() && roles.contains("analyzers")) {
        if (!roles["analyzers"].is_array()) {
            issues.add("roles.analyzers must be a list of backend ids");
        } else {
            for (const auto& a : roles["analyzers"]) {
                const auto id = a.is_string() ? a.get<std::string>() : std::string();
                if (!kinds.count(id)) {
                    issues.add("roles.analyzers refers to unknown backend '" + (a.is_string() ? id : a.dump()) + "'");
                } else {
                    cfg.roles.analyzers.push_back(id);
                }
            }
        }
    }
    if (cfg.roles.analyzers.empty() == false && cfg.quorum > cfg.roles.analyzers.size()) {
        issues.add("fan_out.quorum exceeds the number of analyzers");
    }
    if (cfg.motion_store && cfg.roles.embedder.empty()) issues.add("motion_store needs roles.embedder");

    if (auto cat = doc.find("catalog"); cat != doc.end() && !cat->is_null()) {
        if (!cat->is_array()) {
            issues.add("catalog must be a list");
        } else {
            const auto& names = motioncore::builtin_tool_names();
            std::set<std::string> ids;
            for (size_t i = 0; i < cat->size(); ++i) {
                const auto& e = (*cat)[i];
                const auto where = "catalog[" + std::to_string(i) + "]";
                if (!e.is_object()) {
                    issues.add(where + " must be an object");
                    continue;
                }
                std::string tool_id = value_or<std::string>(e, "tool_id", "");
                if (e.contains("builtin")) {
                    const auto name = value_or<std::string>(e, "builtin", "");
                    if (std::find(names.begin(), names.end(), name) == names.end()) {
                        issues.add(where + ": unknown builtin '" + name + "'");
                        continue;
                    }
                    if (tool_id.empty()) tool_id = motioncore::builtin_descriptor(name).tool_id;
                } else {
                    if (tool_id.empty()) issues.add(where + ": missing tool_id");
                    const auto caps = e.value("capabilities", json());
                    if (!caps.is_array() || caps.empty()) issues.add(where + ": capabilities must be a non-empty list");
                    const auto backend = value_or<std::string>(e, "backend", "");
                    if (!kinds.count(backend)) issues.add(where + ": unknown backend '" + backend + "'");
                }
                if (!tool_id.empty() && !ids.insert(tool_id).second) issues.add(where + ": duplicate tool_id '" + tool_id + "'");
            }
            cfg.catalog = *cat;
        }
    }

    if (!issues.empty()) {
        throw Error(ErrorCode::ConfigInvalid,
                    std::to_string(issues.list().size()) + " config issue(s): " + text::join(issues.list(), "; "),
                    issues.list());
    }
    return cfg;
}

EngineConfig load_config(const fs::path& path) {
    std::string body;
    try {
        body = read_file(path);
    } catch (const std::exception& e) {
        throw Error(ErrorCode::ConfigInvalid, "cannot read config " + path.string() + ": " + e.what());
    }
    auto doc = json::parse(body, nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorCode::ConfigInvalid, "config " + path.string() + " is not valid JSON");
    return parse_config(doc, fs::absolute(path).parent_path());
}

namespace {

BackendHandle make_backend(const BackendSpec& b, const EngineConfig& cfg, const RuntimeOptions& opts) {
    if (b.transport == "template") {
        if (b.kind == BackendKind::Judge) return std::make_shared<bench::TemplateJudge>(b.id);
        return std::make_shared<agents::TemplateReasoner>(b.id);
    }
    if (b.transport == "mock") {
        return std::make_shared<backends::MockBackend>(b.id, b.kind, backends::mock_script_from_json(b.options), opts.clock);
    }
    if (b.transport == "remote") {
        backends::RemoteEndpoint ep{value_or<std::string>(b.options, "endpoint", ""),
                                    value_or<std::string>(b.options, "auth_env", ""),
                                    std::chrono::milliseconds(value_or<std::int64_t>(b.options, "timeout_ms", 30000))};
        return std::make_shared<backends::RemoteBackend>(b.id, b.kind, ep);
    }
    if (b.transport == "replay") {
        return std::make_shared<backends::ReplayBackend>(b.id, b.kind,
                                                         resolve(cfg.base_dir, b.options["cassette"].get<std::string>()));
    }
    return std::make_shared<backends::HashProjectionEmbedder>(
        b.id, static_cast<size_t>(b.options["dimension"].get<std::int64_t>()),
        value_or<std::uint64_t>(b.options, "seed", 0));
}

} // namespace

json Runtime::backend_summary() const {
    json out = json::array();
    std::vector<BackendSpec> specs = config.backends;
    std::sort(specs.begin(), specs.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (const auto& b : specs) out.push_back({{"id", b.id}, {"kind", backends::to_string(b.kind)}, {"transport", b.transport}});
    return out;
}

json Runtime::bench_metadata() const {
    return {{"config_hash", config.config_hash},
            {"backends", backend_summary()},
            {"aggregation", motioncore::to_string(config.aggregation)}};
}

Runtime build_runtime(const EngineConfig& cfg, const RuntimeOptions& opts) {
    Runtime rt;
    rt.config = cfg;

    if (opts.record_dir) {
        std::error_code ec;
        fs::create_directories(*opts.record_dir, ec);
    }
    for (const auto& b : cfg.backends) {
        BackendHandle handle;
        try {
            handle = make_backend(b, cfg, opts);
            if (opts.record_dir) handle = backends::record_cassette(handle, *opts.record_dir / (b.id + ".jsonl"));
        } catch (const Error& e) {
            throw Error(ErrorCode::ConfigInvalid, "backend '" + b.id + "': " + e.message(), e.to_json());
        }
        rt.backends[b.id] = handle;
    }
    auto pick = [&](const std::string& id) -> BackendHandle { return id.empty() ? nullptr : rt.backends.at(id); };

    auto settings = std::make_shared<motioncore::MotionCoreSettings>();
    for (const auto& id : cfg.roles.analyzers) settings->analyzers.push_back(rt.backends.at(id));
    settings->confidence = cfg.confidence;
    settings->deadline = cfg.deadline;
    settings->quorum = cfg.quorum;
    settings->clock = opts.clock;
    settings->aggregation = cfg.aggregation;
    settings->aggregator = pick(cfg.roles.aggregator);
    settings->specialist = pick(cfg.roles.specialist);
    settings->generator = pick(cfg.roles.generator);
    settings->embedder = pick(cfg.roles.embedder);
    settings->prompts = cfg.prompts;
    settings->retrieve_k = cfg.retrieve_k;
    settings->knowledge_k = cfg.knowledge_k;
    try {
        if (cfg.motion_store) settings->store = std::make_shared<motioncore::MotionStore>(motioncore::MotionStore::load(*cfg.motion_store));
        if (cfg.knowledge_base) {
            settings->knowledge = std::make_shared<motioncore::KnowledgeBase>(motioncore::KnowledgeBase::load(*cfg.knowledge_base));
        }
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigInvalid, e.message(), e.detail());
    }
    rt.settings = settings;

    rt.engine = std::make_shared<agents::Engine>();
    rt.engine->planner = pick(cfg.roles.planner);
    rt.engine->verifier = pick(cfg.roles.verifier);
    rt.engine->selector = pick(cfg.roles.selector);
    rt.engine->generator = pick(cfg.roles.generator);
    rt.engine->prompts = cfg.prompts;
    rt.engine->round_budget = cfg.round_budget;
    rt.judge = pick(cfg.roles.judge);

    if (cfg.catalog.is_null()) {
        motioncore::register_builtin_tools(*rt.engine->registry, settings);
    } else {
        for (const auto& entry : cfg.catalog) register_catalog_entry(rt, entry);
    }
    return rt;
}

void register_catalog_entry(Runtime& rt, const json& entry) {
    if (!entry.is_object()) throw Error(ErrorCode::ConfigInvalid, "catalog entry must be an object");
    auto& registry = *rt.engine->registry;
    const bool enabled = value_or<bool>(entry, "enabled", true);
    std::string tool_id;
    try {
        if (entry.contains("builtin")) {
            const auto name = entry["builtin"].get<std::string>();
            auto desc = motioncore::builtin_descriptor(name);
            if (!motioncore::builtin_available(name, *rt.settings)) {
                throw Error(ErrorCode::ConfigInvalid, "builtin '" + name + "' lacks the models or data it needs");
            }
            if (auto id = value_or<std::string>(entry, "tool_id", ""); !id.empty()) desc.tool_id = id;
            tool_id = desc.tool_id;
            registry.register_tool(desc, motioncore::builtin_handler(name, rt.settings));
        } else {
            motioncore::ToolDescriptor desc;
            desc.tool_id = value_or<std::string>(entry, "tool_id", "");
            for (const auto& c : entry.value("capabilities", json::array())) desc.capabilities.insert(c.get<std::string>());
            desc.description = value_or<std::string>(entry, "description", "");
            desc.cost_hint = motioncore::CostHint::ModelCall;
            const auto backend = value_or<std::string>(entry, "backend", "");
            auto it = rt.backends.find(backend);
            if (it == rt.backends.end()) throw Error(ErrorCode::ConfigInvalid, "unknown backend '" + backend + "'");
            desc.validate();
            tool_id = desc.tool_id;
            registry.register_tool(desc, motioncore::backend_tool_handler(desc.tool_id, it->second, rt.config.prompts));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigInvalid, std::string("malformed catalog entry: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::DuplicateToolId || e.code() == ErrorCode::ConfigInvalid) throw;
        throw Error(ErrorCode::ConfigInvalid, e.message(), e.detail());
    }
    if (!enabled) registry.set_enabled(tool_id, false);
}

} // namespace motionagent::config
