#include "motionagent/motioncore/analyzer.hpp"

#include "motionagent/common/error.hpp"
#include "motionagent/common/text.hpp"

namespace motionagent::motioncore {

std::vector<ScoredResult> analyze(const AnalysisRequest& request, const std::vector<backends::BackendHandle>& models,
                                  const backends::ConfidenceTable& table, backends::Duration deadline, size_t quorum,
                                  const backends::ClockHandle& clock, const PromptSet& prompts, const std::string& task) {
    request.validate();
    if (models.empty()) throw Error(ErrorCode::InvalidArgument, "no analysis models");
    const backends::ModelRequest call{prompts.get("analyze"),
                                      {{"question", request.question},
                                       {"media", request.media},
                                       {"modality", to_string(request.modality)},
                                       {"task", task}},
                                      "analyze"};
    const auto fan = backends::fan_out(models, call, deadline, quorum, clock);

    std::vector<ScoredResult> results;
    for (const auto& o : fan.outcomes) {
        if (o.status != backends::OutcomeStatus::Ok) continue;
        results.push_back({o.model_id, text::trim(o.response->text),
                           backends::confidence_for(o.model_id, request.modality, table)});
    }
    return results;
}

} // namespace motionagent::motioncore
