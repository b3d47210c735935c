#pragma once

#include "motionagent/backends/backend.hpp"
#include "motionagent/common/prompts.hpp"

#include <optional>
#include <string>

namespace motionagent::bench {

struct Judgement {
    bool correct = false;
    int score = 1;

    friend bool operator==(const Judgement&, const Judgement&) = default;
};

/// Reads {correct, score} from structured fields, a JSON object in the
/// text, or a "yes"/"no" reply carrying an integer score. Score is clamped
/// to [1, 5]. nullopt when nothing usable is present.
std::optional<Judgement> parse_judgement(const backends::ModelResponse& response);

struct JudgeContext {
    std::string question;
    std::string rubric_version = "v1";
    PromptSet prompts;
};

/// Schema "judge", payload {question, prediction, ground_truth,
/// rubric_version}. An unparseable reply earns one re-prompt carrying the
/// previous reply; a second one raises JudgeParseError. Backend errors
/// become ReasonerFailure.
Judgement judge_answer(const std::string& prediction, const std::string& ground_truth, backends::Backend& judge,
                       const JudgeContext& ctx = {});

/// Deterministic judge. Correct when the prediction covers at least half
/// of the ground-truth tokens (or matches it after normalization); the
/// score grows with that coverage.
class TemplateJudge final : public backends::Backend {
public:
    explicit TemplateJudge(std::string model_id = "template-judge");

    backends::ModelResponse invoke(const backends::ModelRequest& request) override;
};

} // namespace motionagent::bench
