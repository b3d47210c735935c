#include <doctest.h>

#include "motionagent/agents/engine.hpp"
#include "motionagent/agents/executor.hpp"
#include "motionagent/agents/planner.hpp"
#include "motionagent/agents/template_reasoner.hpp"
#include "motionagent/agents/verifier.hpp"
#include "motionagent/backends/mock_backend.hpp"

#include <atomic>
#include <functional>
#include <random>

using namespace motionagent;
using namespace motionagent::agents;
using namespace motionagent::backends;
using namespace motionagent::motioncore;

namespace {

ToolDescriptor desc(const std::string& id, const std::string& cap) { return {id, {cap}, "tool for " + cap, {}, CostHint::Cheap}; }

ToolHandler ok(const std::string& payload) {
    return [payload](const ToolInvocation&) { return ToolOutput{payload, json::object()}; };
}

ToolHandler concat_upstream(const std::string& prefix) {
    return [prefix](const ToolInvocation& inv) {
        std::string s = prefix;
        for (const auto* up : inv.upstream()) s += "[" + up->output.payload + "]";
        return ToolOutput{s, json::object()};
    };
}

std::shared_ptr<ToolRegistry> registry_with(const std::vector<std::string>& caps) {
    auto reg = std::make_shared<ToolRegistry>();
    for (const auto& c : caps) reg->register_tool(desc(c + "_tool", c), concat_upstream(c));
    return reg;
}

UserQuery make_query(const std::string& text, bool media = true) {
    UserQuery q;
    q.text = text;
    q.session_id = "s1";
    if (media) q.attachments.push_back(MediaRef{"vid1", std::nullopt, std::string("squat.mp4")});
    return q;
}

std::vector<std::string> caps_of(const MetaTaskPlan& p) {
    std::vector<std::string> out;
    for (const auto& t : p.tasks) out.push_back(t.capability);
    return out;
}

MetaTaskPlan chain_plan(const std::vector<std::string>& caps) {
    MetaTaskPlan p;
    p.objectives = {{"o1", "whole", std::nullopt}};
    for (size_t i = 0; i < caps.size(); ++i) {
        MetaTask t{"t" + std::to_string(i + 1), "o1", caps[i], {}, {}};
        if (i > 0) {
            t.depends_on = {"t" + std::to_string(i)};
            t.inputs = {Binding::of_output("t" + std::to_string(i))};
        }
        p.tasks.push_back(t);
    }
    return p;
}

} // namespace

TEST_CASE("template planner decomposes a counting question") {
    auto reg = registry_with({"analyze_motion", "aggregate", "count_repetitions", "generate_answer"});
    auto p = plan(make_query("How many squats in this video?"), reg->snapshot(), std::make_shared<TemplateReasoner>());
    CHECK(caps_of(p) == std::vector<std::string>{"count_repetitions", "aggregate", "generate_answer"});
    CHECK(p.objectives.size() == 1);
    CHECK(p.version == 1);
    CHECK(p.tasks[1].depends_on == std::vector<std::string>{"t1"});
    CHECK(p.tasks[2].depends_on == std::vector<std::string>{"t2"});
    CHECK(p.tasks[0].inputs[0].kind == Binding::Kind::Media);
}

TEST_CASE("template planner describes motion as analyze, aggregate, generate") {
    auto reg = registry_with({"analyze_motion", "aggregate", "generate_answer"});
    const auto q = make_query("Describe the motion", false);
    auto p = plan(q, reg->snapshot(), std::make_shared<TemplateReasoner>());
    CHECK(caps_of(p) == std::vector<std::string>{"analyze_motion", "aggregate", "generate_answer"});
    CHECK(plan_issues(p, q, nullptr).empty());
}

TEST_CASE("template planner splits objectives per sentence") {
    auto reg = registry_with({"analyze_motion", "aggregate", "count_repetitions", "generate_answer", "lookup_knowledge"});
    const auto q = make_query("Count the squats. Which muscles do they train?");
    auto p = plan(q, reg->snapshot(), std::make_shared<TemplateReasoner>());
    REQUIRE(p.objectives.size() == 2);
    CHECK(q.text.substr(p.objectives[1].span->first, p.objectives[1].span->second - p.objectives[1].span->first) ==
          "Which muscles do they train?");
    CHECK(caps_of(p) == std::vector<std::string>{"count_repetitions", "aggregate", "analyze_motion", "aggregate",
                                                 "lookup_knowledge", "generate_answer"});
    CHECK(p.tasks.back().depends_on == std::vector<std::string>{"t2", "t4", "t5"});
}

TEST_CASE("plan errors") {
    ToolCatalog empty;
    try {
        plan(make_query("x"), empty, std::make_shared<TemplateReasoner>());
        FAIL("expected EmptyCatalog");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyCatalog);
    }

    auto reg = registry_with({"analyze_motion"});
    try {
        plan(make_query("x"), reg->snapshot(), std::make_shared<TemplateReasoner>());
        FAIL("expected UndecomposableQuery");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UndecomposableQuery);
    }

    auto dead = std::make_shared<MockBackend>("llm", BackendKind::Reasoner, MockScript{}.fail("plan", ErrorCode::Timeout));
    CHECK_THROWS_WITH_AS(plan(make_query("x"), reg->snapshot(), dead), doctest::Contains("ReasonerFailure"), Error);
}

TEST_CASE("plan repairs malformed output once") {
    auto reg = registry_with({"analyze_motion", "generate_answer"});
    const std::string good = R"({"objectives":[{"id":"o1","description":"d","span":"whole-query"}],
        "tasks":[{"id":"a","objective_id":"o1","capability":"analyze_motion","inputs":[],"depends_on":[]},
                 {"id":"g","objective_id":"o1","capability":"generate_answer","inputs":[{"output":"a"}],"depends_on":["a"]}]})";
    auto once = std::make_shared<MockBackend>("llm", BackendKind::Reasoner,
                                              MockScript{}.respond("plan", "not json", 1).respond("plan", good));
    auto p = plan(make_query("x"), reg->snapshot(), once);
    CHECK(p.tasks.size() == 2);
    REQUIRE(once->requests().size() == 2);
    CHECK(once->requests()[1].payload.contains("repair"));

    auto never = std::make_shared<MockBackend>("llm", BackendKind::Reasoner, MockScript{}.respond("plan", "{\"tasks\": 3}"));
    CHECK_THROWS_WITH_AS(plan(make_query("x"), reg->snapshot(), never), doctest::Contains("UndecomposableQuery"), Error);
    CHECK(never->call_count() == 2);

    const std::string unknown_cap = R"({"objectives":[{"id":"o1","description":"d"}],
        "tasks":[{"id":"a","objective_id":"o1","capability":"teleport","inputs":[],"depends_on":[]}]})";
    auto bad_cap = std::make_shared<MockBackend>("llm", BackendKind::Reasoner, MockScript{}.respond("plan", unknown_cap));
    CHECK_THROWS_AS(plan(make_query("x"), reg->snapshot(), bad_cap), Error);
}

TEST_CASE("select_tool") {
    auto reg = std::make_shared<ToolRegistry>();
    reg->register_tool(desc("counter", "count_repetitions"), ok("1"));
    reg->register_tool(desc("first", "analyze_motion"), ok("a"));
    reg->register_tool(desc("second", "analyze_motion"), ok("b"));
    const auto cat = reg->snapshot();
    CHECK(select_tool({"t1", "o1", "count_repetitions", {}, {}}, cat, nullptr).tool_id == "counter");
    CHECK(select_tool({"t1", "o1", "analyze_motion", {}, {}}, cat, nullptr).tool_id == "first");
    try {
        select_tool({"t1", "o1", "translate_speech", {}, {}}, cat, nullptr);
        FAIL("expected NoToolAvailable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoToolAvailable);
    }
    auto picks_second = std::make_shared<MockBackend>("llm", BackendKind::Reasoner,
                                                      MockScript{}.respond("select_tool", R"({"tool_id":"second","rationale":"better"})"));
    CHECK(select_tool({"t1", "o1", "analyze_motion", {}, {}}, cat, picks_second).tool_id == "second");
    auto nonsense = std::make_shared<MockBackend>("llm", BackendKind::Reasoner, MockScript{}.respond("select_tool", "banana"));
    CHECK(select_tool({"t1", "o1", "analyze_motion", {}, {}}, cat, nonsense).tool_id == "first");
}

TEST_CASE("execute_plan runs a chain in dependency order") {
    auto reg = registry_with({"analyze_motion", "aggregate", "generate_answer"});
    auto p = chain_plan({"analyze_motion", "aggregate", "generate_answer"});
    std::swap(p.tasks[0], p.tasks[2]);  // plan order need not be execution order
    auto r = execute_plan(p, reg->snapshot(), make_query("q"));
    REQUIRE(r.outcomes.size() == 3);
    CHECK(r.outcomes[0].task_id == "t1");
    CHECK(r.outcomes[1].task_id == "t2");
    CHECK(r.outcomes[2].task_id == "t3");
    CHECK(r.outcomes[2].output.payload == "generate_answer[aggregate[analyze_motion]]");
    for (const auto& o : r.outcomes) CHECK(o.status == TaskStatus::Completed);
}

TEST_CASE("execute_plan propagates failures downstream without invoking") {
    auto reg = std::make_shared<ToolRegistry>();
    std::atomic<int> generate_calls{0};
    reg->register_tool(desc("an", "analyze_motion"), ok("x"));
    reg->register_tool(desc("ag", "aggregate"), [](const ToolInvocation&) -> ToolOutput {
        throw Error(ErrorCode::QuorumNotMet, "only 1 of 3 analyzers answered");
    });
    reg->register_tool(desc("ge", "generate_answer"), [&](const ToolInvocation&) {
        ++generate_calls;
        return ToolOutput{"never", {}};
    });
    auto r = execute_plan(chain_plan({"analyze_motion", "aggregate", "generate_answer"}), reg->snapshot(), make_query("q"));
    CHECK(r.outcomes[0].status == TaskStatus::Completed);
    CHECK(r.outcomes[1].status == TaskStatus::Errored);
    CHECK(r.outcomes[1].error->code == "QuorumNotMet");
    CHECK(r.outcomes[2].status == TaskStatus::Errored);
    CHECK(r.outcomes[2].error->message == kUpstreamFailure);
    CHECK(generate_calls == 0);
}

TEST_CASE("verify_plan structural checks") {
    auto reg = registry_with({"analyze_motion", "generate_answer"});
    const auto cat = reg->snapshot();
    const auto q = make_query("q");

    auto missing = chain_plan({"analyze_motion", "teleport"});
    auto v = verify_plan(missing, q, cat, nullptr);
    CHECK(v.decision == Decision::Reject);
    CHECK(v.reasons[0].find("teleport") != std::string::npos);

    auto cyclic = chain_plan({"analyze_motion", "generate_answer"});
    cyclic.tasks[0].depends_on = {"t2"};
    v = verify_plan(cyclic, q, cat, nullptr);
    CHECK(v.decision == Decision::Reject);
    CHECK(std::find(v.reasons.begin(), v.reasons.end(), "cycle in meta-task dependencies") != v.reasons.end());

    auto approve = std::make_shared<MockBackend>("llm", BackendKind::Reasoner,
                                                 MockScript{}.respond("verify_plan", R"({"decision":"approve"})"));
    CHECK(verify_plan(chain_plan({"analyze_motion", "generate_answer"}), q, cat, approve).approved());

    MetaTaskPlan empty;
    CHECK_FALSE(verify_plan(empty, q, cat, nullptr).approved());
    // Structural rejection never consults the reasoner.
    CHECK(approve->call_count() == 1);
}

TEST_CASE("cycle detection matches a brute-force path walk on all digraphs up to 4 tasks") {
    UserQuery q = make_query("q");
    for (size_t n = 1; n <= 4; ++n) {
        const size_t edges = n * n;
        for (size_t mask = 0; mask < (size_t{1} << edges); ++mask) {
            MetaTaskPlan p;
            p.objectives = {{"o1", "", std::nullopt}};
            std::vector<std::vector<bool>> adj(n, std::vector<bool>(n));
            for (size_t i = 0; i < n; ++i) p.tasks.push_back({"t" + std::to_string(i), "o1", "x", {}, {}});
            for (size_t e = 0; e < edges; ++e) {
                if (!(mask >> e & 1)) continue;
                const size_t from = e / n, to = e % n;
                adj[from][to] = true;
                p.tasks[from].depends_on.push_back("t" + std::to_string(to));
            }
            // A cycle exists iff some node reaches itself by a walk of length 1..n.
            bool cyclic = false;
            for (size_t s = 0; s < n && !cyclic; ++s) {
                std::vector<bool> frontier = adj[s];
                for (size_t step = 0; step < n && !cyclic; ++step) {
                    if (frontier[s]) cyclic = true;
                    std::vector<bool> next(n);
                    for (size_t a = 0; a < n; ++a) {
                        if (!frontier[a]) continue;
                        for (size_t b = 0; b < n; ++b) next[b] = next[b] || adj[a][b];
                    }
                    frontier = next;
                }
            }
            const auto issues = plan_issues(p, q, nullptr);
            const bool flagged = std::find(issues.begin(), issues.end(), "cycle in meta-task dependencies") != issues.end();
            CHECK(flagged == cyclic);
        }
    }
}

TEST_CASE("verify_results") {
    const auto q = make_query("q");
    RoundRecord errored;
    errored.outcomes = {{"t1", "count_repetitions", "", TaskStatus::Errored, {}, TaskError{"NoToolAvailable", "none"}},
                        {"t2", "aggregate", "", TaskStatus::Errored, {}, TaskError{"UpstreamFailure", kUpstreamFailure}}};
    auto v = verify_results(errored, q, nullptr);
    CHECK(v.decision == Decision::Reject);
    CHECK(v.revision_hints == std::vector<std::string>{"count_repetitions unavailable"});
    CHECK(v.reasons.size() == 2);

    RoundRecord fine;
    fine.outcomes = {{"t1", "analyze_motion", "a", TaskStatus::Completed, {"jumping", {}}, std::nullopt}};
    auto approve = std::make_shared<MockBackend>("llm", BackendKind::Reasoner, MockScript{}.respond("verify_results", "approve"));
    CHECK(verify_results(fine, q, approve).approved());
    auto reject = std::make_shared<MockBackend>(
        "llm", BackendKind::Reasoner,
        MockScript{}.respond("verify_results", R"({"decision":"reject","reasons":["answer off-topic"]})"));
    v = verify_results(fine, q, reject);
    CHECK(v.decision == Decision::Reject);
    CHECK(v.reasons == std::vector<std::string>{"answer off-topic"});
}

TEST_CASE("replan substitutes unavailable capabilities") {
    auto full = registry_with({"analyze_motion", "aggregate", "count_repetitions", "generate_answer"});
    auto reasoner = std::make_shared<TemplateReasoner>();
    const auto q = make_query("How many squats in this video?");
    auto prior = plan(q, full->snapshot(), reasoner);
    Verdict reject{Decision::Reject, VerdictTarget::Results, {"task t1 failed"}, {"count_repetitions unavailable"}};
    auto revised = replan(prior, reject, q, full->snapshot(), reasoner);
    CHECK(caps_of(revised) == std::vector<std::string>{"analyze_motion", "aggregate", "generate_answer"});
    CHECK(revised.version == prior.version + 1);

    CHECK_THROWS_WITH_AS(replan(prior, Verdict::approve(VerdictTarget::Results), q, full->snapshot(), reasoner),
                         doctest::Contains("PreconditionViolation"), Error);

    Verdict plain{Decision::Reject, VerdictTarget::Results, {"off-topic"}, {}};
    auto same = replan(revised, plain, q, full->snapshot(), reasoner);
    CHECK(caps_of(same) == caps_of(revised));
    CHECK(same.version == 3);
}

TEST_CASE("replan drops knowledge lookups that cannot be served") {
    auto reg = registry_with({"analyze_motion", "aggregate", "generate_answer", "lookup_knowledge"});
    auto reasoner = std::make_shared<TemplateReasoner>();
    const auto q = make_query("Describe it. Why is it good?");
    auto prior = plan(q, reg->snapshot(), reasoner);
    REQUIRE(prior.objectives.size() == 2);
    Verdict reject{Decision::Reject, VerdictTarget::Results, {"x"}, {"lookup_knowledge unavailable"}};
    auto revised = replan(prior, reject, q, reg->snapshot(), reasoner);
    for (const auto& t : revised.tasks) CHECK(t.capability != "lookup_knowledge");
    CHECK(plan_issues(revised, q, nullptr).empty());
}

namespace {

struct Harness {
    std::shared_ptr<Engine> engine = std::make_shared<Engine>();
    std::shared_ptr<std::atomic<int>> analyze_calls = std::make_shared<std::atomic<int>>(0);

    explicit Harness(int fail_first) {
        engine->planner = std::make_shared<TemplateReasoner>();
        engine->verifier = engine->planner;
        auto calls = analyze_calls;
        engine->registry->register_tool(desc("counter", "count_repetitions"), [calls, fail_first](const ToolInvocation&) {
            if ((*calls)++ < fail_first) throw Error(ErrorCode::Timeout, "analyzer timed out");
            return ToolOutput{"5", {}};
        });
        engine->registry->register_tool(desc("agg", "aggregate"), concat_upstream("agg"));
        engine->registry->register_tool(desc("gen", "generate_answer"), concat_upstream("answer:"));
    }
};

} // namespace

TEST_CASE("run_session_turn answers in one round when everything works") {
    Harness h(0);
    std::vector<std::string> events;
    auto out = run_session_turn(make_query("How many squats?"), *h.engine,
                                [&](const std::string& e, const json&) { events.push_back(e); });
    REQUIRE(out.answered());
    CHECK(out.answer->text == "answer:[agg[5]]");
    CHECK(out.trace.rounds.size() == 1);
    CHECK(events.front() == "plan_ready");
    CHECK(events.back() == "answer");
}

TEST_CASE("feedback loop: failing the first k rounds with budget 3") {
    for (int k = 0; k <= 3; ++k) {
        Harness h(k);
        auto out = run_session_turn(make_query("How many squats?"), *h.engine);
        CAPTURE(k);
        CHECK(out.answered() == (k < 3));
        CHECK(out.trace.rounds.size() == static_cast<size_t>(k < 3 ? k + 1 : 3));
        for (size_t i = 0; i < out.trace.rounds.size(); ++i) CHECK(out.trace.rounds[i].plan.version == static_cast<int>(i + 1));
        if (k == 3) {
            CHECK(out.failure->code() == ErrorCode::RoundBudgetExhausted);
            CHECK(out.trace.failure->code == "RoundBudgetExhausted");
        }
    }
}

TEST_CASE("errored outcomes always carry error info") {
    Harness h(3);
    auto out = run_session_turn(make_query("How many squats?"), *h.engine);
    for (const auto& r : out.trace.rounds) {
        for (const auto& o : r.outcomes) {
            if (o.status != TaskStatus::Errored) continue;
            REQUIRE(o.error.has_value());
            CHECK_FALSE(o.error->message.empty());
            CHECK((o.error->message == kUpstreamFailure || o.error->code != "UpstreamFailure"));
        }
    }
}

TEST_CASE("planner failure ends the turn with zero rounds") {
    Harness h(0);
    h.engine->planner = std::make_shared<MockBackend>("llm", BackendKind::Reasoner, MockScript{}.fail("plan", ErrorCode::TransportError));
    std::vector<std::string> events;
    auto out = run_session_turn(make_query("q"), *h.engine, [&](const std::string& e, const json&) { events.push_back(e); });
    CHECK_FALSE(out.answered());
    CHECK(out.trace.rounds.empty());
    CHECK(out.failure->code() == ErrorCode::ReasonerFailure);
    CHECK(events == std::vector<std::string>{"failure"});
}

TEST_CASE("a planner insisting on a disabled tool ends the turn with NoToolAvailable") {
    Harness h(0);
    // A planner that insists on count_repetitions even when it is not offered.
    auto stubborn = std::make_shared<MockBackend>("llm", BackendKind::Reasoner, [](const ModelRequest&) {
        const json p = json::parse(R"({"objectives":[{"id":"o1","description":"d"}],
            "tasks":[{"id":"t1","objective_id":"o1","capability":"count_repetitions","inputs":[],"depends_on":[]},
                     {"id":"t2","objective_id":"o1","capability":"generate_answer","inputs":[{"output":"t1"}],"depends_on":["t1"]}]})");
        ModelResponse resp;
        resp.text = p.dump();
        return resp;
    });
    h.engine->planner = stubborn;
    h.engine->verifier = nullptr;
    h.engine->registry->set_enabled("counter", false);
    auto out = run_session_turn(make_query("How many squats?"), *h.engine);
    CHECK_FALSE(out.answered());
    CHECK(out.failure->code() == ErrorCode::NoToolAvailable);
    CHECK(stubborn->call_count() == 2);
}

TEST_CASE("template reasoner plans cover every objective for random queries") {
    const std::vector<std::string> fragments = {"How many squats",  "Count the reps",         "Describe the motion",
                                                "Why is it useful", "Find similar movements", "Explain the technique",
                                                "What happens next", "Is the form correct"};
    auto reg = registry_with({"analyze_motion", "aggregate", "count_repetitions", "generate_answer", "retrieve_motion",
                              "lookup_knowledge"});
    const auto cat = reg->snapshot();
    auto reasoner = std::make_shared<TemplateReasoner>();
    std::mt19937 rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        std::string text;
        const size_t n = 1 + rng() % 4;
        for (size_t i = 0; i < n; ++i) text += fragments[rng() % fragments.size()] + (rng() % 2 ? "? " : ". ");
        const auto q = make_query(text, rng() % 2);
        auto p = plan(q, cat, reasoner);
        CHECK(plan_issues(p, q, &cat).empty());
        CHECK(verify_plan(p, q, cat, reasoner).approved());
        CHECK(p.tasks.back().capability == "generate_answer");
    }
}

TEST_CASE("identical turns serialize to identical traces") {
    Harness a(1), b(1);
    const auto q = make_query("How many squats?");
    const auto ta = serialize_trace(run_session_turn(q, *a.engine).trace);
    const auto tb = serialize_trace(run_session_turn(q, *b.engine).trace);
    CHECK(ta == tb);
    auto doc = json::parse(ta);
    CHECK(doc["turn_id"] == "s1/0");
    CHECK(doc["rounds"].size() == 2);
    CHECK(doc["final_status"] == "answered");
}
