#include "motionagent/bench/runner.hpp"

#include "motionagent/common/error.hpp"
#include "motionagent/common/hash.hpp"
#include "motionagent/common/text.hpp"

#include <array>
#include <atomic>
#include <cstdio>
#include <mutex>
#include <thread>

namespace motionagent::bench {

std::string case_session_id(std::uint64_t seed, const std::string& case_id) {
    std::uint64_t state = seed;
    const auto h = fnv1a64(case_id, splitmix64(state));
    char buf[24];
    std::snprintf(buf, sizeof buf, "case-%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::optional<long long> extract_count(const std::string& answer) {
    long long n = 0;
    if (text::first_integer(answer, n)) return n;
    static const std::array<const char*, 21> kWords = {
        "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
        "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen", "twenty"};
    for (const auto& tok : text::tokenize(answer)) {
        for (size_t i = 0; i < kWords.size(); ++i) {
            if (tok == kWords[i]) return static_cast<long long>(i);
        }
    }
    return std::nullopt;
}

void mark_failed(CaseResult& r, const std::string& why) {
    r.failed = true;
    r.failure = why;
    r.correct = false;
    r.score = 0;
}

} // namespace

CaseResult run_case(const BenchCase& c, const agents::Engine& engine, backends::Backend* judge,
                    const BenchOptions& options) {
    CaseResult r;
    r.case_id = c.case_id;
    r.kind = c.kind;
    r.category = c.category;
    r.truth_count = c.truth_count;
    if (c.kind == TaskKind::RepCount) r.predicted_count = 0;

    UserQuery q;
    q.text = render_question(c);
    q.attachments = {c.media};
    q.session_id = case_session_id(options.seed, c.case_id);
    q.turn_index = 0;

    agents::TurnOutcome outcome;
    try {
        outcome = agents::run_session_turn(q, engine);
    } catch (const Error& e) {
        mark_failed(r, std::string(to_string(e.code())) + ": " + e.message());
        return r;
    }
    r.rounds = static_cast<int>(outcome.trace.rounds.size());
    if (!outcome.answered() || !outcome.answer) {
        const auto why = outcome.failure ? std::string(to_string(outcome.failure->code())) + ": " + outcome.failure->message()
                                         : std::string("turn did not produce an answer");
        mark_failed(r, why);
        return r;
    }
    r.prediction = outcome.answer->text;

    switch (c.kind) {
        case TaskKind::FreeQA:
            try {
                auto j = judge_answer(r.prediction, c.ground_truth, *judge,
                                      {c.question, options.rubric_version, options.prompts});
                r.correct = j.correct;
                r.score = j.score;
            } catch (const Error& e) {
                mark_failed(r, std::string(to_string(e.code())) + ": " + e.message());
            }
            break;
        case TaskKind::MultipleChoice:
            r.correct = eval_multiple_choice(r.prediction, c.options, c.ground_truth);
            r.score = r.correct ? 5 : 0;
            break;
        case TaskKind::RepCount:
            if (auto n = extract_count(r.prediction)) {
                r.predicted_count = *n;
            } else {
                r.count_unparsed = true;
            }
            r.correct = r.predicted_count == c.truth_count;
            r.score = r.correct ? 5 : 0;
            break;
    }
    return r;
}

BenchReport run_benchmark(const std::vector<BenchCase>& cases, BenchFormat format, const agents::Engine& engine,
                          backends::BackendHandle judge, const BenchOptions& options) {
    const auto kind = task_kind_of(format);
    for (const auto& c : cases) {
        if (c.kind != kind) {
            throw Error(ErrorCode::InvalidArgument,
                        "case '" + c.case_id + "' is not a " + std::string(to_string(kind)) + " case");
        }
    }
    if (kind == TaskKind::FreeQA && !cases.empty() && !judge) {
        throw Error(ErrorCode::InvalidArgument, "free-form questions need a judge backend");
    }

    std::vector<CaseResult> results(cases.size());
    std::atomic<size_t> next{0};
    std::mutex cb_mu;
    auto worker = [&] {
        for (size_t i = next++; i < cases.size(); i = next++) {
            results[i] = run_case(cases[i], engine, judge.get(), options);
            if (options.on_case) {
                std::lock_guard lock(cb_mu);
                options.on_case(results[i]);
            }
        }
    };
    const size_t n_workers = std::max<size_t>(1, std::min(options.concurrency, cases.size()));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    json metadata = options.metadata.is_object() ? options.metadata : json::object();
    metadata["seed"] = options.seed;
    metadata["rubric_version"] = options.rubric_version;
    metadata["cases"] = cases.size();
    return build_report(format, std::move(results), std::move(metadata));
}

} // namespace motionagent::bench
