#include "motionagent/common/prompts.hpp"

#include "motionagent/common/error.hpp"

namespace motionagent {

namespace {

const std::map<std::string, std::string>& defaults() {
    static const std::map<std::string, std::string> table = {
        {"plan",
         "Decompose the user's request into objectives and meta-tasks. Use only capabilities listed in the "
         "catalog. Reply with JSON: {\"objectives\": [{\"id\", \"description\", \"span\"}], \"tasks\": [{\"id\", "
         "\"objective_id\", \"capability\", \"inputs\", \"depends_on\"}]}."},
        {"replan",
         "Revise the plan so that it addresses every rejection reason and revision hint. Reply with the full "
         "plan JSON in the same shape as before."},
        {"select_tool", "Pick the tool whose description best fits the meta-task. Reply with JSON: {\"tool_id\", \"rationale\"}."},
        {"verify_plan",
         "Check that the meta-tasks are logically structured and aligned with the user's request. Reply with "
         "JSON: {\"decision\": \"approve\"|\"reject\", \"reasons\": [], \"revision_hints\": []}."},
        {"verify_results",
         "Check that the results of the round answer the user's request. Reply with JSON: {\"decision\": "
         "\"approve\"|\"reject\", \"reasons\": [], \"revision_hints\": []}."},
        {"analyze", "Analyze the attached human motion and answer the question concisely."},
        {"aggregate",
         "Several models answered the same question with predefined confidence weights. Integrate them, giving "
         "more weight to confident and mutually agreeing answers. Reply with one of the candidate answers."},
        {"motion_aware_estimate",
         "Given the candidate analyses with their confidences and the raw motion data, produce a preliminary "
         "answer."},
        {"motion_aware_refine",
         "Re-examine the preliminary answer against the candidate analyses, correct any bias, and reply with the "
         "final answer."},
        {"generate", "Answer the user's request using the supplied context entries."},
        {"judge",
         "Compare the prediction with the ground truth. Reply with JSON: {\"correct\": true|false, \"score\": "
         "1-5}."},
        {"embed", "Embed the text."},
    };
    return table;
}

} // namespace

std::string PromptSet::get(const std::string& schema_tag) const {
    if (auto it = overrides_.find(schema_tag); it != overrides_.end()) return it->second;
    if (auto it = defaults().find(schema_tag); it != defaults().end()) return it->second;
    return "Complete the task described by the payload.";
}

PromptSet prompt_set_from_json(const json& j) {
    if (j.is_null()) return {};
    if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, "prompts must be an object of tag -> text");
    std::map<std::string, std::string> overrides;
    for (const auto& [tag, text] : j.items()) {
        if (!text.is_string()) throw Error(ErrorCode::ConfigInvalid, "prompt '" + tag + "' must be a string");
        overrides[tag] = text.get<std::string>();
    }
    return PromptSet(std::move(overrides));
}

} // namespace motionagent
