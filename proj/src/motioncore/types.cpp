#include "motionagent/motioncore/types.hpp"

#include "motionagent/common/error.hpp"

namespace motionagent::motioncore {

void AnalysisRequest::validate() const {
    if (media.empty()) throw Error(ErrorCode::InvalidArgument, "analysis request has no media");
    if (media.modality() != modality) {
        throw Error(ErrorCode::InvalidArgument, "modality " + std::string(to_string(modality)) +
                                                    " does not match media " + media.id);
    }
}

void to_json(json& j, const ScoredResult& r) {
    j = {{"model_id", r.model_id}, {"text", r.text}, {"confidence", r.confidence}};
}

void from_json(const json& j, ScoredResult& r) {
    r.model_id = j.at("model_id").get<std::string>();
    r.text = j.at("text").get<std::string>();
    r.confidence = j.at("confidence").get<double>();
}

std::string_view to_string(AggregationMethod m) noexcept {
    return m == AggregationMethod::MotionAware ? "motion_aware" : "confidence";
}

json to_json(const StageRecord& s) {
    json j = {{"stage", s.stage}, {"model_id", s.model_id}, {"input", s.input}};
    if (s.output) j["output"] = *s.output;
    if (s.error) j["error"] = *s.error;
    return j;
}

json to_json(const AggregatedResult& r) {
    json j = {{"final_text", r.final_text},
              {"method", to_string(r.method)},
              {"winning_cluster", r.winning_cluster},
              {"support_mass", r.support_mass},
              {"degraded", r.degraded}};
    if (r.preliminary) j["preliminary"] = *r.preliminary;
    json stages = json::array();
    for (const auto& s : r.stages) stages.push_back(to_json(s));
    j["stages"] = std::move(stages);
    return j;
}

void to_json(json& j, const AnswerPayload& a) { j = {{"text", a.text}, {"cited", a.cited}}; }

void from_json(const json& j, AnswerPayload& a) {
    a.text = j.at("text").get<std::string>();
    a.cited = value_or(j, "cited", std::vector<std::string>{});
}

} // namespace motionagent::motioncore
