#include "motionagent/motioncore/generator.hpp"

#include "motionagent/common/error.hpp"
#include "motionagent/common/text.hpp"

namespace motionagent::motioncore {

AnswerPayload generate_answer(const GenerationContext& context, const backends::BackendHandle& reasoner,
                              const PromptSet& prompts) {
    if (context.entries.empty()) throw Error(ErrorCode::EmptyContext, "no context to answer from");
    if (!reasoner) throw Error(ErrorCode::PreconditionViolation, "no generator backend configured");

    json entries = json::array();
    AnswerPayload answer;
    for (const auto& e : context.entries) {
        entries.push_back({{"task_id", e.task_id}, {"tool_id", e.tool_id}, {"payload", e.payload}});
        answer.cited.push_back(e.task_id);
    }
    const json payload = {{"query", context.query.text}, {"context", std::move(entries)}};

    backends::ModelResponse reply;
    try {
        reply = reasoner->invoke({prompts.get("generate"), payload, "generate"});
    } catch (const Error& e) {
        throw Error(ErrorCode::ReasonerFailure, "generator " + reasoner->model_id() + ": " + e.what(), e.to_json());
    }
    answer.text = text::trim(reply.text);
    if (answer.text.empty()) throw Error(ErrorCode::ReasonerFailure, "generator " + reasoner->model_id() + " returned an empty answer");
    return answer;
}

} // namespace motionagent::motioncore
