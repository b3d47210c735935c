#include <doctest.h>

#include "motionagent/agents/template_reasoner.hpp"
#include "motionagent/backends/mock_backend.hpp"
#include "motionagent/bench/dataset.hpp"
#include "motionagent/bench/judge.hpp"
#include "motionagent/bench/metrics.hpp"
#include "motionagent/bench/report.hpp"
#include "motionagent/bench/runner.hpp"
#include "motionagent/common/error.hpp"
#include "motionagent/motioncore/tools.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

using namespace motionagent;
using namespace motionagent::backends;
using namespace motionagent::bench;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& body) {
    auto dir = fs::temp_directory_path() / ("ma_bench_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    auto p = dir / name;
    std::ofstream(p) << body;
    return p;
}

std::string movid_line(const std::string& id, const std::string& cat, const std::string& gt) {
    return json{{"case_id", id},
                {"category", cat},
                {"media", {{"id", "m-" + id}, {"motion", id + ".npy"}}},
                {"question", "What does the person do?"},
                {"ground_truth", gt}}
               .dump() +
           "\n";
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST_CASE("load_dataset reads every record") {
    std::string body;
    const char* cats[] = {"Body", "Seq", "Dir", "Rea", "Hall"};
    for (int i = 0; i < 20; ++i) body += movid_line("c" + std::to_string(i), cats[i % 5], "jumping");
    auto cases = load_dataset(write_temp("ok.jsonl", body), BenchFormat::MoVid);
    CHECK(cases.size() == 20);
    CHECK(cases[3].category == "Rea");
    CHECK(cases[0].kind == TaskKind::FreeQA);
}

TEST_CASE("load_dataset reports every bad line") {
    std::string body = movid_line("a", "Body", "x");
    body += R"({"case_id":"b","category":"Seq","media":{"id":"m","motion":"b.npy"},"question":"q?"})" "\n";
    body += "{not json\n";
    body += movid_line("c", "Legs", "x");
    try {
        load_dataset(write_temp("bad.jsonl", body), BenchFormat::MoVid);
        FAIL("expected ValidationError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ValidationError);
        REQUIRE(e.detail().size() == 3);
        CHECK(e.detail()[0]["line"] == 2);
        CHECK(e.detail()[0]["message"].get<std::string>().find("ground_truth") != std::string::npos);
        CHECK(e.detail()[1]["line"] == 3);
        CHECK(e.detail()[2]["line"] == 4);
        CHECK(e.message().find("line 2") != std::string::npos);
    }
}

TEST_CASE("load_dataset format checks") {
    CHECK(code_of([] { bench_format_from_string("kinetics"); }) == ErrorCode::UnknownFormat);
    CHECK(bench_format_from_string("MVBench") == BenchFormat::MVBench);

    auto mc = write_temp("mc.jsonl",
                         R"({"case_id":"1","category":"AL","media":{"id":"v","video":"v.mp4"},"question":"Which?","options":["walking","running"],"ground_truth":"b"})"
                         "\n"
                         R"({"case_id":"2","category":"AP","media":{"id":"v","video":"v.mp4"},"question":"Which?","options":["walking"],"ground_truth":"A"})"
                         "\n");
    try {
        load_dataset(mc, BenchFormat::MVBench);
        FAIL("expected ValidationError");
    } catch (const Error& e) {
        REQUIRE(e.detail().size() == 1);
        CHECK(e.detail()[0]["line"] == 2);
    }

    auto rc = write_temp("rc.jsonl",
                         R"({"case_id":"1","media":{"id":"m","motion":"m.npy"},"question":"How many?","ground_truth":7})"
                         "\n"
                         R"({"case_id":"2","media":{"id":"m","motion":"m.npy"},"question":"How many?","ground_truth":-1})"
                         "\n");
    CHECK(code_of([&] { load_dataset(rc, BenchFormat::RepCount); }) == ErrorCode::ValidationError);

    auto dup = write_temp("dup.jsonl", movid_line("a", "Body", "x") + movid_line("a", "Seq", "y"));
    CHECK(code_of([&] { load_dataset(dup, BenchFormat::MoVid); }) == ErrorCode::ValidationError);
    CHECK(code_of([&] { load_dataset("/nonexistent/x.jsonl", BenchFormat::MoVid); }) == ErrorCode::ValidationError);
}

TEST_CASE("babel-qa categories are matched case-insensitively") {
    auto p = write_temp("babel.jsonl",
                        R"({"case_id":"1","category":"body part","media":{"id":"m","motion":"m.npy"},"question":"Which part?","ground_truth":"left arm"})"
                        "\n");
    auto cases = load_dataset(p, BenchFormat::BabelQA);
    CHECK(cases[0].category == "Body Part");
}

// ---------------------------------------------------------------- judge

TEST_CASE("judge_answer parses scripted verdicts") {
    MockStep yes;
    yes.text = "yes";
    yes.fields = {{"score", 4}};
    MockBackend judge("judge", BackendKind::Judge, MockScript{}.on("judge", yes));
    CHECK(judge_answer("jumping", "jumping", judge) == Judgement{true, 4});

    MockBackend high("judge", BackendKind::Judge, MockScript{}.respond("judge", R"({"correct": false, "score": 9})"));
    CHECK(judge_answer("a", "b", high) == Judgement{false, 5});

    MockBackend low("judge", BackendKind::Judge, MockScript{}.respond("judge", "No. Score: 0"));
    CHECK(judge_answer("a", "b", low) == Judgement{false, 1});
}

TEST_CASE("judge_answer re-prompts once, then gives up") {
    MockBackend garbage("judge", BackendKind::Judge, MockScript{}.respond("judge", "hmm, hard to say"));
    CHECK(code_of([&] { judge_answer("a", "b", garbage); }) == ErrorCode::JudgeParseError);
    CHECK(garbage.call_count() == 2);
    CHECK(garbage.requests()[1].payload.contains("reprompt"));

    MockBackend recovers("judge", BackendKind::Judge,
                         MockScript{}.respond("judge", "???", 1).respond("judge", "yes, 3"));
    CHECK(judge_answer("a", "b", recovers) == Judgement{true, 3});

    MockBackend down("judge", BackendKind::Judge, MockScript{}.fail("judge", ErrorCode::TransportError));
    CHECK(code_of([&] { judge_answer("a", "b", down); }) == ErrorCode::ReasonerFailure);
    CHECK(down.call_count() == 1);
}

TEST_CASE("judge request carries the rubric version") {
    MockBackend judge("judge", BackendKind::Judge, MockScript{}.respond("judge", "yes 5"));
    judge_answer("p", "g", judge, {"q?", "v7", {}});
    const auto req = judge.requests().at(0);
    CHECK(req.schema_tag == "judge");
    CHECK(req.payload["rubric_version"] == "v7");
    CHECK(req.payload["prediction"] == "p");
    CHECK(req.payload["ground_truth"] == "g");
}

TEST_CASE("template judge is deterministic and bounded") {
    TemplateJudge judge;
    CHECK(judge_answer("The person is jumping", "jumping", judge) == Judgement{true, 5});
    CHECK(judge_answer("sitting", "jumping forward", judge) == Judgement{false, 1});
    CHECK(judge_answer("jumping back", "jumping forward", judge) == Judgement{true, 3});
    std::mt19937 rng(3);
    const char* words[] = {"left", "arm", "jump", "walk", "turn", "right", "slowly"};
    for (int i = 0; i < 200; ++i) {
        std::string p, g;
        for (int k = 0; k < 1 + static_cast<int>(rng() % 4); ++k) p += std::string(words[rng() % 7]) + " ";
        for (int k = 0; k < 1 + static_cast<int>(rng() % 4); ++k) g += std::string(words[rng() % 7]) + " ";
        auto j = judge_answer(p, g, judge);
        CHECK(j.score >= 1);
        CHECK(j.score <= 5);
        CHECK(j == judge_answer(p, g, judge));
    }
}

// ---------------------------------------------------------------- multiple choice

namespace {

const std::vector<ChoiceOption> kWalkRun = {{"A", "walking"}, {"B", "running"}};

// Independent re-statement of the three matching rules, character-level.
std::string oracle_lower_alnum_words(const std::string& s) {
    std::string out = " ";
    for (char ch : s) {
        const auto c = static_cast<unsigned char>(ch);
        out += std::isalnum(c) ? static_cast<char>(std::tolower(c)) : ' ';
    }
    out += " ";
    std::string squeezed;
    for (char c : out) {
        if (c == ' ' && !squeezed.empty() && squeezed.back() == ' ') continue;
        squeezed += c;
    }
    return squeezed;
}

std::optional<size_t> oracle_match(const std::string& pred, const std::vector<ChoiceOption>& opts) {
    std::string p;
    for (char ch : pred) p += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    while (!p.empty() && std::isspace(static_cast<unsigned char>(p.front()))) p.erase(p.begin());
    while (!p.empty() && std::isspace(static_cast<unsigned char>(p.back()))) p.pop_back();

    auto pick = [&](const std::vector<size_t>& hits) -> std::optional<size_t> {
        if (hits.size() == 1) return hits[0];
        return std::nullopt;
    };
    auto letter_hits = [&](char letter) {
        std::vector<size_t> hits;
        for (size_t i = 0; i < opts.size(); ++i) {
            if (opts[i].id.size() == 1 && std::tolower(static_cast<unsigned char>(opts[i].id[0])) == letter) hits.push_back(i);
        }
        return hits;
    };

    // rule 1
    std::string q = p;
    if (q.rfind("option ", 0) == 0) q = q.substr(7);
    std::optional<char> letter;
    if (q.size() >= 3 && q[0] == '(' && std::isalpha(static_cast<unsigned char>(q[1])) && q[2] == ')') {
        letter = q[1];
    } else if (!q.empty() && std::isalpha(static_cast<unsigned char>(q[0])) &&
               (q.size() == 1 || q[1] == '.' || q[1] == ':' || q[1] == ')')) {
        letter = q[0];
    } else if (p.rfind("option ", 0) == 0 && !q.empty() && std::isalpha(static_cast<unsigned char>(q[0])) &&
               (q.size() == 1 || !std::isalnum(static_cast<unsigned char>(q[1])))) {
        letter = q[0];
    }
    if (letter) {
        if (auto r = pick(letter_hits(*letter))) return r;
    }
    // rule 2
    std::vector<size_t> hits;
    for (size_t i = 0; i < opts.size(); ++i) {
        if (oracle_lower_alnum_words(opts[i].text) == oracle_lower_alnum_words(pred)) hits.push_back(i);
    }
    if (auto r = pick(hits)) return r;
    // rule 3
    hits.clear();
    const auto hay = oracle_lower_alnum_words(pred);
    for (size_t i = 0; i < opts.size(); ++i) {
        const auto needle = oracle_lower_alnum_words(opts[i].text);
        if (needle != " " && hay.find(needle) != std::string::npos) hits.push_back(i);
    }
    return pick(hits);
}

} // namespace

TEST_CASE("eval_multiple_choice examples") {
    CHECK(eval_multiple_choice("B) running", kWalkRun, "B"));
    CHECK(eval_multiple_choice("the person is running", kWalkRun, "B"));
    CHECK(eval_multiple_choice("(a)", kWalkRun, "A"));
    CHECK(eval_multiple_choice("Option B", kWalkRun, "B"));
    CHECK(eval_multiple_choice("Running.", kWalkRun, "B"));
    CHECK_FALSE(eval_multiple_choice("walking then running", kWalkRun, "A"));
    CHECK_FALSE(eval_multiple_choice("jumping", kWalkRun, "A"));
    CHECK_FALSE(eval_multiple_choice("a person is jumping", kWalkRun, "A"));
    CHECK_FALSE(eval_multiple_choice("C) crawling", kWalkRun, "A"));
}

TEST_CASE("option matcher agrees with an independent oracle") {
    const std::vector<std::vector<ChoiceOption>> option_sets = {
        kWalkRun,
        {{"A", "turn left"}, {"B", "turn right"}, {"C", "jump"}, {"D", "sit down"}},
        {{"A", "run"}, {"B", "running fast"}, {"C", "walk"}}};
    const std::vector<std::string> fragments = {"the person", "is", "turn", "left", "right", "jump", "sit down",
                                                "running", "fast", "walk", "walking", "run", "b)", "(c)",
                                                "a.", "option d", "D", "maybe", "not"};
    std::mt19937 rng(17);
    int agreed = 0;
    for (int t = 0; t < 3000; ++t) {
        const auto& opts = option_sets[rng() % option_sets.size()];
        std::string pred;
        const int n = 1 + static_cast<int>(rng() % 4);
        for (int k = 0; k < n; ++k) pred += (k ? " " : "") + fragments[rng() % fragments.size()];
        if (rng() % 5 == 0) pred = opts[rng() % opts.size()].text;
        CAPTURE(pred);
        CHECK(match_option(pred, opts) == oracle_match(pred, opts));
        agreed += match_option(pred, opts) == oracle_match(pred, opts);
    }
    CHECK(agreed == 3000);
}

// ---------------------------------------------------------------- repcount metrics

namespace {

struct OracleMetrics {
    long double obo, obz, mae, rmse;
};

OracleMetrics brute_force(const std::vector<long long>& p, const std::vector<long long>& t) {
    long double obo = 0, obz = 0, mae = 0, sq = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        const long long d = p[i] > t[i] ? p[i] - t[i] : t[i] - p[i];
        if (d == 0 || d == 1) obo += 1;
        if (d == 0) obz += 1;
        mae += static_cast<long double>(d) / (t[i] == 0 ? 1 : t[i]);
        sq += static_cast<long double>(d) * d;
    }
    const long double n = t.size();
    return {obo / n, obz / n, mae / n, std::sqrt(sq / n)};
}

} // namespace

TEST_CASE("repcount_metrics examples") {
    auto id = repcount_metrics({3, 0, 7}, {3, 0, 7});
    CHECK(id.obo == 1.0);
    CHECK(id.obz == 1.0);
    CHECK(id.mae == 0.0);
    CHECK(id.rmse == 0.0);

    auto m = repcount_metrics({3, 5}, {3, 4});
    CHECK(m.obz == 0.5);
    CHECK(m.obo == 1.0);
    CHECK(m.mae == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(m.rmse == doctest::Approx(0.70710678).epsilon(1e-8));

    CHECK(repcount_metrics({1}, {0}).mae == 1.0);

    CHECK(code_of([] { repcount_metrics({1, 2}, {1}); }) == ErrorCode::LengthMismatch);
    CHECK(code_of([] { repcount_metrics({}, {}); }) == ErrorCode::EmptyInput);
    CHECK(code_of([] { repcount_metrics({1}, {-1}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("repcount_metrics matches the brute-force oracle") {
    std::mt19937 rng(99);
    for (int t = 0; t < 100; ++t) {
        const size_t n = 1 + rng() % 50;
        std::vector<long long> p(n), g(n);
        for (size_t i = 0; i < n; ++i) {
            g[i] = rng() % 31;
            p[i] = rng() % 31;
            if (rng() % 3 == 0) p[i] = g[i] + static_cast<long long>(rng() % 3) - 1;
        }
        auto got = repcount_metrics(p, g);
        auto want = brute_force(p, g);
        CHECK(std::fabs(got.obo - static_cast<double>(want.obo)) <= 1e-9);
        CHECK(std::fabs(got.obz - static_cast<double>(want.obz)) <= 1e-9);
        CHECK(std::fabs(got.mae - static_cast<double>(want.mae)) <= 1e-9);
        CHECK(std::fabs(got.rmse - static_cast<double>(want.rmse)) <= 1e-9);
    }
}

TEST_CASE("repcount_metrics bounds hold on random inputs") {
    std::mt19937 rng(5);
    int violations = 0;
    for (int t = 0; t < 10000; ++t) {
        const size_t n = 1 + rng() % 20;
        std::vector<long long> p(n), g(n);
        for (size_t i = 0; i < n; ++i) {
            g[i] = rng() % 12;
            p[i] = rng() % 4 == 0 ? g[i] : static_cast<long long>(rng() % 12);
        }
        auto m = repcount_metrics(p, g);
        const bool ok = m.obo >= 0 && m.obo <= 1 && m.obz >= 0 && m.obz <= 1 && m.obz <= m.obo && m.mae >= 0 &&
                        m.rmse >= 0 && ((m.rmse == 0) == (m.obz == 1));
        violations += !ok;
    }
    CHECK(violations == 0);
}

// ---------------------------------------------------------------- report

namespace {

CaseResult result(const std::string& id, const std::string& cat, bool correct, int score, bool failed = false) {
    CaseResult r;
    r.case_id = id;
    r.category = cat;
    r.correct = correct;
    r.score = score;
    r.failed = failed;
    if (failed) r.failure = "Timeout: slow";
    return r;
}

} // namespace

TEST_CASE("movid report has exactly the published columns") {
    std::vector<CaseResult> rs = {result("1", "Body", true, 5), result("2", "Seq", false, 2),
                                  result("3", "Dir", true, 4), result("4", "Rea", true, 3),
                                  result("5", "Hall", false, 0, true)};
    auto report = build_report(BenchFormat::MoVid, rs, {{"seed", 1}});
    auto j = to_json(report);
    CHECK(j["columns"] == json({"Body.", "Seq.", "Dir.", "Rea.", "Hall.", "All"}));
    CHECK(j["results"].size() == 6);
    CHECK(j["results"]["All"]["accuracy"] == 60.0);
    CHECK(j["results"]["All"]["score"] == doctest::Approx(2.8));
    CHECK(j["failed_cases"] == 1);
    CHECK(j["cases"][4]["failure"] == "Timeout: slow");
    const auto table = render_table(report);
    for (const char* label : {"Body.", "Seq.", "Dir.", "Rea.", "Hall.", "All", "Acc.", "Score"}) {
        CHECK(table.find(label) != std::string::npos);
    }
}

TEST_CASE("categories without cases are null") {
    auto report = build_report(BenchFormat::MoVid, {result("1", "Body", true, 5)}, json::object());
    auto j = to_json(report);
    CHECK(j["results"]["Seq."]["accuracy"].is_null());
    CHECK(j["results"]["Seq."]["score"].is_null());
    CHECK(j["results"]["All"]["accuracy"] == 100.0);
    CHECK(render_table(report).find("-") != std::string::npos);
}

TEST_CASE("other layouts") {
    CHECK(column_labels(BenchFormat::BabelQA) ==
          std::vector<std::string>{"Action", "Direction", "Body Part", "Before", "After", "Other", "Overall"});
    CHECK(column_labels(BenchFormat::MVBench) ==
          std::vector<std::string>{"AL", "AP", "AS", "EN", "FA", "FP", "UA", "Avg."});
    CHECK(column_labels(BenchFormat::RepCount) == std::vector<std::string>{"All"});

    auto babel = build_report(BenchFormat::BabelQA, {result("1", "Action", true, 5), result("2", "Other", false, 1)}, {});
    const auto table = render_table(babel);
    CHECK(table.find("Overall") < table.find("Action"));
    CHECK(table.find("0.500") != std::string::npos);

    CaseResult rc = result("1", "", false, 0);
    rc.kind = TaskKind::RepCount;
    rc.predicted_count = 5;
    rc.truth_count = 4;
    auto rep = build_report(BenchFormat::RepCount, {rc}, {});
    REQUIRE(rep.repcount);
    CHECK(rep.repcount->obo == 1.0);
    CHECK(to_json(rep)["repcount"]["MAE"] == 0.25);
    CHECK(render_table(rep).find("OBO") != std::string::npos);

    CHECK(code_of([] { build_report(BenchFormat::MoVid, {result("1", "Legs", true, 5)}, {}); }) ==
          ErrorCode::InvalidArgument);
}

TEST_CASE("overall accuracy is the case-weighted mean of categories") {
    std::mt19937 rng(8);
    const auto& cats = format_categories(BenchFormat::MoVid);
    for (int t = 0; t < 200; ++t) {
        std::vector<CaseResult> rs;
        const int n = 1 + static_cast<int>(rng() % 40);
        for (int i = 0; i < n; ++i) {
            const bool ok = rng() % 2;
            rs.push_back(result("c" + std::to_string(i), cats[rng() % cats.size()], ok, ok ? 5 : 1 + static_cast<int>(rng() % 3)));
        }
        auto report = build_report(BenchFormat::MoVid, rs, {});
        size_t cases = 0, correct = 0;
        long long scores = 0;
        for (size_t c = 0; c + 1 < report.columns.size(); ++c) {
            cases += report.columns[c].cases;
            correct += report.columns[c].correct;
            scores += report.columns[c].score_sum;
        }
        CHECK(cases == report.overall().cases);
        CHECK(correct == report.overall().correct);
        CHECK(scores == report.overall().score_sum);
        CHECK(*report.overall().accuracy() == 100.0 * static_cast<double>(correct) / static_cast<double>(cases));
        for (const auto& col : report.columns) {
            if (!col.cases) continue;
            CHECK(*col.accuracy() >= 0.0);
            CHECK(*col.accuracy() <= 100.0);
            CHECK(*col.mean_score() >= 0.0);
            CHECK(*col.mean_score() <= 5.0);
        }

        auto shuffled = rs;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(serialize_report(build_report(BenchFormat::MoVid, shuffled, {})) == serialize_report(report));
    }
}

// ---------------------------------------------------------------- run_benchmark

namespace {

// Analyzers answer from a per-media table; media "broken" makes every
// analyzer fail so the turn exhausts its rounds.
std::shared_ptr<agents::Engine> bench_engine() {
    auto settings = std::make_shared<motioncore::MotionCoreSettings>();
    auto answer = [](const ModelRequest& r) {
        const auto id = r.payload["media"]["id"].get<std::string>();
        if (id == "broken") throw Error(ErrorCode::TransportError, "analyzer offline");
        ModelResponse resp;
        if (id == "count") {
            resp.text = "7";
        } else if (id == "vid") {
            resp.text = "B) running";
        } else {
            resp.text = "the person jumps forward";
        }
        return resp;
    };
    settings->analyzers = {std::make_shared<MockBackend>("A", BackendKind::MotionSpecialist, answer),
                           std::make_shared<MockBackend>("V", BackendKind::VideoSpecialist, answer)};
    settings->confidence = ConfidenceTable(0.5);
    auto reasoner = std::make_shared<agents::TemplateReasoner>();
    settings->generator = reasoner;
    auto engine = std::make_shared<agents::Engine>();
    engine->planner = reasoner;
    engine->verifier = reasoner;
    motioncore::register_builtin_tools(*engine->registry, settings);
    return engine;
}

BenchCase freeqa(const std::string& id, const std::string& cat, const std::string& media, const std::string& gt) {
    BenchCase c;
    c.case_id = id;
    c.category = cat;
    c.media = {media, media + ".npy", std::nullopt};
    c.question = "What does the person do?";
    c.ground_truth = gt;
    return c;
}

} // namespace

TEST_CASE("run_benchmark scores free-form cases and flags failed turns") {
    auto engine = bench_engine();
    std::vector<BenchCase> cases = {freeqa("a", "Body", "m1", "jumps forward"), freeqa("b", "Seq", "m2", "sits down"),
                                    freeqa("c", "Hall", "broken", "jumps")};
    BenchOptions opts;
    opts.seed = 11;
    opts.metadata = {{"config_hash", "abc"}};
    auto report = run_benchmark(cases, BenchFormat::MoVid, *engine, std::make_shared<TemplateJudge>(), opts);
    REQUIRE(report.cases.size() == 3);
    CHECK(report.cases[0].correct);
    CHECK(report.cases[0].score == 5);
    CHECK_FALSE(report.cases[1].correct);
    CHECK(report.cases[2].failed);
    CHECK(report.cases[2].score == 0);
    CHECK(report.cases[2].rounds == 3);
    CHECK(report.cases[2].failure.rfind("RoundBudgetExhausted", 0) == 0);
    CHECK(report.failed_cases == 1);
    CHECK(report.metadata["config_hash"] == "abc");
    CHECK(report.metadata["seed"] == 11);
    CHECK(report.overall().correct == 1);
}

TEST_CASE("run_benchmark is independent of concurrency") {
    std::vector<BenchCase> cases;
    const char* cats[] = {"Body", "Seq", "Dir", "Rea", "Hall"};
    for (int i = 0; i < 12; ++i) {
        cases.push_back(freeqa("case" + std::to_string(i), cats[i % 5], i % 4 == 3 ? "broken" : "m" + std::to_string(i),
                               i % 2 ? "jumps" : "sits"));
    }
    BenchOptions serial;
    serial.seed = 3;
    BenchOptions parallel = serial;
    parallel.concurrency = 4;
    const auto a = serialize_report(run_benchmark(cases, BenchFormat::MoVid, *bench_engine(), std::make_shared<TemplateJudge>(), serial));
    const auto b = serialize_report(run_benchmark(cases, BenchFormat::MoVid, *bench_engine(), std::make_shared<TemplateJudge>(), parallel));
    CHECK(a == b);
}

TEST_CASE("run_benchmark multiple choice and repetition counting") {
    auto engine = bench_engine();
    BenchCase mc;
    mc.case_id = "mc";
    mc.kind = TaskKind::MultipleChoice;
    mc.category = "AL";
    mc.media = {"vid", std::nullopt, std::string("vid.mp4")};
    mc.question = "What is the person doing?";
    mc.options = kWalkRun;
    mc.ground_truth = "B";
    auto mv = run_benchmark({mc}, BenchFormat::MVBench, *engine, nullptr, {});
    CHECK(mv.cases[0].correct);
    CHECK(mv.cases[0].score == 5);
    CHECK(*mv.column("Avg.")->accuracy() == 100.0);

    BenchCase rc = freeqa("rc", "", "count", "7");
    rc.kind = TaskKind::RepCount;
    rc.truth_count = 7;
    rc.question = "How many squats?";
    BenchCase rc_fail = freeqa("rc2", "", "broken", "3");
    rc_fail.kind = TaskKind::RepCount;
    rc_fail.truth_count = 3;
    auto rep = run_benchmark({rc, rc_fail}, BenchFormat::RepCount, *engine, nullptr, {});
    REQUIRE(rep.repcount);
    CHECK(rep.cases[0].predicted_count == 7);
    CHECK(rep.cases[1].failed);
    CHECK(rep.cases[1].predicted_count == 0);
    CHECK(rep.repcount->obz == 0.5);

    CHECK(code_of([&] { run_benchmark({freeqa("x", "Body", "m", "y")}, BenchFormat::MoVid, *engine, nullptr, {}); }) ==
          ErrorCode::InvalidArgument);
    CHECK(code_of([&] { run_benchmark({rc}, BenchFormat::MoVid, *engine, std::make_shared<TemplateJudge>(), {}); }) ==
          ErrorCode::InvalidArgument);
}

TEST_CASE("case session ids depend only on seed and case id") {
    CHECK(case_session_id(1, "a") == case_session_id(1, "a"));
    CHECK(case_session_id(1, "a") != case_session_id(2, "a"));
    CHECK(case_session_id(1, "a") != case_session_id(1, "b"));
}
