#include <doctest.h>

#include "motionagent/agents/engine.hpp"
#include "motionagent/common/error.hpp"
#include "motionagent/config/engine_config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <unistd.h>

using namespace motionagent;
using namespace motionagent::config;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("ma_config_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

json base_config() {
    return json::parse(R"({
        "seed": 7,
        "fan_out": {"deadline_ms": 2000, "quorum": 1},
        "backends": [
            {"id": "llm", "kind": "reasoner", "transport": "template"},
            {"id": "judge", "kind": "judge", "transport": "template"},
            {"id": "A", "kind": "motion_specialist", "transport": "mock",
             "responses": {"analyze": ["the person squats 5 times"]}},
            {"id": "B", "kind": "motion_specialist", "transport": "mock",
             "responses": {"analyze": ["5 squats"]}},
            {"id": "tool-llm", "kind": "reasoner", "transport": "mock",
             "responses": {"*": ["external tool output"]}}
        ],
        "roles": {"planner": "llm", "verifier": "llm", "generator": "llm",
                  "analyzers": ["A", "B"], "judge": "judge"},
        "confidence_table": {"default": 0.5, "entries": [{"model_id": "A", "modality": "motion", "confidence": 0.9}]}
    })");
}

UserQuery query(const std::string& text) {
    UserQuery q;
    q.text = text;
    q.attachments = {MediaRef{"m1", std::string("m1.npy"), std::nullopt}};
    q.session_id = "s";
    return q;
}

std::vector<std::string> issues_of(const json& doc, const fs::path& base = fs::temp_directory_path()) {
    try {
        parse_config(doc, base);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigInvalid);
        return e.detail().get<std::vector<std::string>>();
    }
    return {};
}

bool mentions(const std::vector<std::string>& issues, const std::string& needle) {
    for (const auto& i : issues) {
        if (i.find(needle) != std::string::npos) return true;
    }
    return false;
}

} // namespace

TEST_CASE("a valid config builds a runnable engine") {
    auto cfg = parse_config(base_config(), fs::temp_directory_path());
    CHECK(cfg.seed == 7);
    CHECK(cfg.quorum == 1);
    CHECK(cfg.config_hash.size() == 64);
    auto rt = build_runtime(cfg);
    REQUIRE(rt.judge);
    auto out = agents::run_session_turn(query("How many squats?"), *rt.engine);
    REQUIRE(out.answered());
    CHECK(out.answer->text == "the person squats 5 times");
    CHECK(rt.bench_metadata()["backends"].size() == 5);
    CHECK(rt.bench_metadata()["backends"][0]["id"] == "A");
}

TEST_CASE("config hash ignores key order") {
    auto a = base_config();
    json b = json::parse(a.dump());
    CHECK(parse_config(a, "/").config_hash == parse_config(b, "/").config_hash);
    b["seed"] = 8;
    CHECK(parse_config(a, "/").config_hash != parse_config(b, "/").config_hash);
}

TEST_CASE("validation lists every issue") {
    auto doc = base_config();
    doc["colour"] = "blue";
    doc["round_budget"] = 0;
    doc["aggregation"] = "vote";
    doc["backends"].push_back({{"id", "x"}, {"kind", "reasoner"}, {"transport", "carrier-pigeon"}});
    doc["backends"].push_back({{"id", "A"}, {"kind", "reasoner"}, {"transport", "template"}});
    doc["roles"].erase("planner");
    doc["roles"]["judge"] = "nobody";
    const auto issues = issues_of(doc);
    CHECK(issues.size() == 7);
    CHECK(mentions(issues, "unknown key 'colour'"));
    CHECK(mentions(issues, "round_budget"));
    CHECK(mentions(issues, "aggregation"));
    CHECK(mentions(issues, "carrier-pigeon"));
    CHECK(mentions(issues, "duplicate backend id 'A'"));
    CHECK(mentions(issues, "roles.planner is required"));
    CHECK(mentions(issues, "'nobody'"));
}

TEST_CASE("transport-specific checks") {
    ::unsetenv("MA_CONFIG_TEST_TOKEN");
    auto doc = base_config();
    doc["backends"].push_back({{"id", "r"}, {"kind", "reasoner"}, {"transport", "remote"},
                               {"endpoint", "http://127.0.0.1:9/v1"}, {"auth_env", "MA_CONFIG_TEST_TOKEN"}});
    doc["backends"].push_back({{"id", "p"}, {"kind", "reasoner"}, {"transport", "replay"}, {"cassette", "missing.jsonl"}});
    doc["backends"].push_back({{"id", "e"}, {"kind", "reasoner"}, {"transport", "hash_embedder"}, {"dimension", 8}});
    doc["backends"].push_back({{"id", "v"}, {"kind", "video_specialist"}, {"transport", "template"}});
    doc["backends"].push_back({{"id", "m"}, {"kind", "reasoner"}, {"transport", "mock"}});
    const auto issues = issues_of(doc);
    CHECK(issues.size() == 5);
    CHECK(mentions(issues, "MA_CONFIG_TEST_TOKEN is not set"));
    CHECK(mentions(issues, "cassette not found"));
    CHECK(mentions(issues, "kind 'embedder'"));
    CHECK(mentions(issues, "reasoner and judge kinds only"));
    CHECK(mentions(issues, "'responses'"));

    ::setenv("MA_CONFIG_TEST_TOKEN", "t", 1);
    CHECK_FALSE(mentions(issues_of(doc), "MA_CONFIG_TEST_TOKEN"));
}

TEST_CASE("motion-aware aggregation needs its two models") {
    auto doc = base_config();
    doc["aggregation"] = "motion_aware";
    const auto issues = issues_of(doc);
    CHECK(mentions(issues, "roles.aggregator is required"));
    CHECK(mentions(issues, "roles.specialist is required"));
}

TEST_CASE("load_config resolves paths against the config file") {
    auto dir = temp_dir("paths");
    fs::create_directories(dir / "kb");
    std::ofstream(dir / "kb" / "passages.jsonl") << R"({"id":"p1","title":"Squat","text":"Squats train the quadriceps."})" "\n";
    auto doc = base_config();
    doc["knowledge_base"] = "kb";
    doc["storage_root"] = "store";
    std::ofstream(dir / "engine.json") << doc.dump(2);
    auto cfg = load_config(dir / "engine.json");
    CHECK(cfg.knowledge_base == dir / "kb");
    CHECK(cfg.storage_root == dir / "store");
    auto rt = build_runtime(cfg);
    CHECK(rt.engine->registry->snapshot().has_capability("lookup_knowledge"));

    std::ofstream(dir / "broken.json") << "{ nope";
    CHECK_THROWS_AS(load_config(dir / "broken.json"), Error);
    CHECK_THROWS_AS(load_config(dir / "absent.json"), Error);
}

TEST_CASE("explicit catalog entries") {
    auto doc = base_config();
    doc["catalog"] = json::parse(R"([
        {"builtin": "analyze_motion"},
        {"builtin": "count_repetitions", "enabled": false},
        {"builtin": "aggregate"},
        {"builtin": "generate_answer"},
        {"tool_id": "pose_scorer", "capabilities": ["score_pose"], "description": "rates form", "backend": "tool-llm"}
    ])");
    auto rt = build_runtime(parse_config(doc, "/"));
    auto catalog = rt.engine->registry->snapshot();
    CHECK(catalog.has_capability("score_pose"));
    CHECK_FALSE(catalog.has_capability("count_repetitions"));
    CHECK(catalog.has_capability("analyze_motion"));

    try {
        register_catalog_entry(rt, json::parse(R"({"tool_id": "pose_scorer", "capabilities": ["x"], "backend": "tool-llm"})"));
        FAIL("expected DuplicateToolId");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DuplicateToolId);
    }
    CHECK_THROWS_AS(register_catalog_entry(rt, json::parse(R"({"builtin": "retrieve_motion"})")), Error);

    auto bad = base_config();
    bad["catalog"] = json::parse(R"([{"builtin": "teleport"}, {"tool_id": "t", "backend": "nope"}])");
    const auto issues = issues_of(bad);
    CHECK(issues.size() == 3);
}

TEST_CASE("recorded cassettes replay the same turn") {
    auto dir = temp_dir("record");
    agents::TurnOutcome first;
    {
        auto rec = build_runtime(parse_config(base_config(), dir), {dir / "cassettes", backends::real_clock()});
        first = agents::run_session_turn(query("How many squats?"), *rec.engine);
    }
    REQUIRE(first.answered());
    CHECK(fs::exists(dir / "cassettes" / "llm.jsonl"));
    CHECK(fs::exists(dir / "cassettes" / "A.jsonl"));

    auto doc = base_config();
    for (auto& b : doc["backends"]) {
        b = {{"id", b["id"]}, {"kind", b["kind"]}, {"transport", "replay"},
             {"cassette", "cassettes/" + b["id"].get<std::string>() + ".jsonl"}};
    }
    std::ofstream(dir / "cassettes" / "judge.jsonl");
    std::ofstream(dir / "cassettes" / "tool-llm.jsonl");
    auto replay = build_runtime(parse_config(doc, dir));
    auto second = agents::run_session_turn(query("How many squats?"), *replay.engine);
    REQUIRE(second.answered());
    CHECK(agents::serialize_trace(second.trace) == agents::serialize_trace(first.trace));
}
