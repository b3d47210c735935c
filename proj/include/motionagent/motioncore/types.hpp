#pragma once

#include "motionagent/common/json_util.hpp"
#include "motionagent/common/media.hpp"
#include "motionagent/common/query.hpp"

#include <optional>
#include <string>
#include <vector>

namespace motionagent::motioncore {

struct AnalysisRequest {
    MediaRef media;
    Modality modality = Modality::Motion;
    std::string question;

    /// Throws InvalidArgument when `modality` disagrees with the media.
    void validate() const;
};

/// One model's answer with its predefined confidence.
struct ScoredResult {
    std::string model_id;
    std::string text;
    double confidence = 0.0;

    friend bool operator==(const ScoredResult&, const ScoredResult&) = default;
};

void to_json(json& j, const ScoredResult& r);
void from_json(const json& j, ScoredResult& r);

enum class AggregationMethod { ConfidenceMechanism, MotionAware };

std::string_view to_string(AggregationMethod m) noexcept;

/// Input and outcome of one model call made while aggregating.
struct StageRecord {
    std::string stage;
    std::string model_id;
    json input;
    std::optional<std::string> output;
    std::optional<std::string> error;
};

json to_json(const StageRecord& s);

struct AggregatedResult {
    std::string final_text;
    AggregationMethod method = AggregationMethod::ConfidenceMechanism;
    /// Sorted model ids of the cluster the final text belongs to.
    std::vector<std::string> winning_cluster;
    /// Stage-1 estimate of the motion-aware mechanism.
    std::optional<std::string> preliminary;
    double support_mass = 0.0;
    /// Set when a reasoner step failed or was overruled and a fallback
    /// value was returned instead.
    bool degraded = false;
    std::vector<StageRecord> stages;
};

json to_json(const AggregatedResult& r);

struct ContextEntry {
    std::string task_id;
    std::string tool_id;
    std::string payload;
};

/// Entries are in execution-completion order.
struct GenerationContext {
    std::vector<ContextEntry> entries;
    UserQuery query;
};

struct AnswerPayload {
    std::string text;
    /// task ids of the context entries supplied to the generator.
    std::vector<std::string> cited;
};

void to_json(json& j, const AnswerPayload& a);
void from_json(const json& j, AnswerPayload& a);

} // namespace motionagent::motioncore
