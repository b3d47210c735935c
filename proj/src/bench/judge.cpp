#include "motionagent/bench/judge.hpp"

#include "motionagent/common/error.hpp"
#include "motionagent/common/text.hpp"

#include <algorithm>
#include <cmath>

namespace motionagent::bench {

using backends::ModelRequest;
using backends::ModelResponse;

namespace {

std::optional<bool> verdict_word(const std::string& word) {
    const auto w = text::to_lower(word);
    if (w == "yes" || w == "true" || w == "correct") return true;
    if (w == "no" || w == "false" || w == "incorrect" || w == "wrong") return false;
    return std::nullopt;
}

std::optional<bool> correct_of(const json& j) {
    if (j.is_boolean()) return j.get<bool>();
    if (j.is_string()) return verdict_word(text::trim(j.get<std::string>()));
    return std::nullopt;
}

std::optional<double> score_of(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        long long n = 0;
        if (text::first_integer(j.get<std::string>(), n)) return static_cast<double>(n);
    }
    return std::nullopt;
}

void read_object(const json& obj, std::optional<bool>& correct, std::optional<double>& score) {
    if (!obj.is_object()) return;
    if (!correct) {
        for (const char* key : {"correct", "pred"}) {
            if (auto it = obj.find(key); it != obj.end() && !correct) correct = correct_of(*it);
        }
    }
    if (!score) {
        if (auto it = obj.find("score"); it != obj.end()) score = score_of(*it);
    }
}

} // namespace

std::optional<Judgement> parse_judgement(const ModelResponse& response) {
    std::optional<bool> correct;
    std::optional<double> score;
    read_object(response.fields, correct, score);
    if (auto obj = extract_json_object(response.text)) read_object(*obj, correct, score);

    const auto words = text::tokenize(response.text);
    if (!correct && !words.empty()) correct = verdict_word(words.front());
    if (!score && correct) {
        long long n = 0;
        if (text::first_integer(response.text, n)) score = static_cast<double>(n);
    }
    if (!correct || !score || !std::isfinite(*score)) return std::nullopt;

    Judgement j;
    j.correct = *correct;
    j.score = static_cast<int>(std::clamp(std::lround(*score), 1L, 5L));
    return j;
}

Judgement judge_answer(const std::string& prediction, const std::string& ground_truth, backends::Backend& judge,
                       const JudgeContext& ctx) {
    ModelRequest req{ctx.prompts.get("judge"),
                     {{"question", ctx.question},
                      {"prediction", prediction},
                      {"ground_truth", ground_truth},
                      {"rubric_version", ctx.rubric_version}},
                     "judge"};
    auto call = [&](const ModelRequest& r) {
        try {
            return judge.invoke(r);
        } catch (const Error& e) {
            throw Error(ErrorCode::ReasonerFailure, "judge '" + judge.model_id() + "' failed: " + e.message(),
                        e.to_json());
        }
    };

    auto first = call(req);
    if (auto j = parse_judgement(first)) return *j;

    req.payload["reprompt"] = {{"previous", first.text},
                               {"instruction", "Reply with JSON {\"correct\": true|false, \"score\": 1-5}."}};
    auto second = call(req);
    if (auto j = parse_judgement(second)) return *j;
    throw Error(ErrorCode::JudgeParseError, "judge reply could not be parsed after one re-prompt",
                {{"replies", {first.text, second.text}}});
}

TemplateJudge::TemplateJudge(std::string model_id)
    : Backend({std::move(model_id), backends::BackendKind::Judge, backends::TransportKind::Template}) {}

ModelResponse TemplateJudge::invoke(const ModelRequest& request) {
    if (request.schema_tag != "judge") {
        throw Error(ErrorCode::PreconditionViolation, "template judge only serves schema 'judge'");
    }
    const auto pred = value_or<std::string>(request.payload, "prediction", "");
    const auto truth = value_or<std::string>(request.payload, "ground_truth", "");

    const auto truth_tokens = text::token_set(truth);
    const auto pred_tokens = text::token_set(pred);
    double coverage = 0;
    if (text::normalize(pred) == text::normalize(truth)) {
        coverage = 1;
    } else if (!truth_tokens.empty()) {
        size_t hit = 0;
        for (const auto& t : truth_tokens) hit += pred_tokens.count(t);
        coverage = static_cast<double>(hit) / static_cast<double>(truth_tokens.size());
    }
    const bool correct = coverage >= 0.5;
    const int score = 1 + static_cast<int>(std::lround(4 * coverage));

    ModelResponse r;
    r.fields = {{"correct", correct}, {"score", score}};
    r.text = canonical_dump(r.fields);
    return r;
}

} // namespace motionagent::bench
