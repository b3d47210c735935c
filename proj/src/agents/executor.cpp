#include "motionagent/agents/executor.hpp"

#include "motionagent/common/error.hpp"

#include <map>

namespace motionagent::agents {

namespace {

void emit(const TurnObserver& observer, const std::string& event, const json& data) {
    if (observer) observer(event, data);
}

TaskError to_task_error(const Error& e) { return {std::string(to_string(e.code())), e.message()}; }

} // namespace

ToolSelection select_tool(const MetaTask& task, const motioncore::ToolCatalog& catalog,
                          const backends::BackendHandle& reasoner, const PromptSet& prompts) {
    if (catalog.empty()) throw Error(ErrorCode::EmptyCatalog, "no tools are registered");
    const auto candidates = catalog.with_capability(task.capability);
    if (candidates.empty()) {
        throw Error(ErrorCode::NoToolAvailable, "no tool offers capability " + task.capability, {{"capability", task.capability}});
    }
    const std::string& first = candidates.front()->descriptor.tool_id;
    if (candidates.size() == 1) return {task.id, first, "only tool offering " + task.capability};
    if (!reasoner) return {task.id, first, "earliest registered of " + std::to_string(candidates.size()) + " candidates"};

    json options = json::array();
    for (const auto* c : candidates) {
        options.push_back({{"tool_id", c->descriptor.tool_id}, {"description", c->descriptor.description}});
    }
    backends::ModelResponse reply;
    try {
        reply = reasoner->invoke({prompts.get("select_tool"), {{"task", task}, {"candidates", std::move(options)}}, "select_tool"});
    } catch (const Error& e) {
        throw Error(ErrorCode::ReasonerFailure, "selector " + reasoner->model_id() + ": " + e.what(), e.to_json());
    }
    std::string chosen;
    std::string rationale;
    if (auto doc = extract_json_object(reply.text); doc && doc->contains("tool_id") && (*doc)["tool_id"].is_string()) {
        chosen = (*doc)["tool_id"].get<std::string>();
        rationale = value_or(*doc, "rationale", std::string{});
    } else {
        chosen = reply.text;
        while (!chosen.empty() && std::isspace(static_cast<unsigned char>(chosen.back()))) chosen.pop_back();
        chosen.erase(0, chosen.find_first_not_of(" \t\n"));
    }
    for (const auto* c : candidates) {
        if (c->descriptor.tool_id == chosen) return {task.id, chosen, rationale.empty() ? "chosen by selector" : rationale};
    }
    return {task.id, first, "selector reply unusable; earliest registered candidate"};
}

Verdict verify_tool_choice(const ToolSelection& selection, const MetaTask& task, const motioncore::ToolCatalog& catalog) {
    const auto* entry = catalog.find(selection.tool_id);
    if (!entry) return {Decision::Reject, VerdictTarget::ToolChoice, {"tool " + selection.tool_id + " is not in the catalog"}, {}};
    if (!entry->descriptor.capabilities.count(task.capability)) {
        return {Decision::Reject, VerdictTarget::ToolChoice,
                {"tool " + selection.tool_id + " does not offer " + task.capability}, {task.capability + " unavailable"}};
    }
    return Verdict::approve(VerdictTarget::ToolChoice);
}

RoundRecord execute_plan(const MetaTaskPlan& plan, const motioncore::ToolCatalog& catalog, const UserQuery& query,
                         const ExecutionOptions& options) {
    RoundRecord record;
    record.round = options.round;
    record.plan = plan;
    const auto order = topological_order(plan);
    if (!order) throw Error(ErrorCode::InvalidPlan, "plan has a cycle or dangling dependency");

    std::map<std::string, size_t> finished;  // task id -> index into record.outcomes
    for (size_t idx : *order) {
        const MetaTask& task = plan.tasks[idx];
        TaskOutcome outcome{task.id, task.capability, "", TaskStatus::Completed, {}, std::nullopt};

        bool upstream_failed = false;
        for (const auto& dep : task.depends_on) {
            auto it = finished.find(dep);
            if (it == finished.end() || record.outcomes[it->second].status == TaskStatus::Errored) upstream_failed = true;
        }

        if (upstream_failed) {
            outcome.status = TaskStatus::Errored;
            outcome.error = TaskError{"UpstreamFailure", kUpstreamFailure};
        } else {
            try {
                const ToolSelection selection = select_tool(task, catalog, options.selector, options.prompts);
                outcome.tool_id = selection.tool_id;
                record.selections.push_back(selection);
                Verdict choice = verify_tool_choice(selection, task, catalog);
                if (!choice.approved()) {
                    record.verdicts.push_back(choice);
                    throw Error(ErrorCode::NoToolAvailable, choice.reasons.front());
                }

                motioncore::ToolInvocation inv{task.id, task.capability, query, {}};
                for (const auto& b : task.inputs) {
                    motioncore::ResolvedInput in;
                    switch (b.kind) {
                    case Binding::Kind::Media:
                        in.kind = motioncore::ResolvedInput::Kind::Media;
                        in.media = b.media;
                        break;
                    case Binding::Kind::Literal:
                        in.kind = motioncore::ResolvedInput::Kind::Literal;
                        in.literal = b.literal;
                        break;
                    case Binding::Kind::Output: {
                        const size_t at = finished.at(b.output);
                        const auto& src = record.outcomes[at];
                        in.kind = motioncore::ResolvedInput::Kind::Upstream;
                        in.source_task = src.task_id;
                        in.source_tool = src.tool_id;
                        in.completion_index = at;
                        in.output = src.output;
                        break;
                    }
                    }
                    inv.inputs.push_back(std::move(in));
                }

                emit(options.observer, "task_started",
                     {{"round", options.round}, {"task_id", task.id}, {"capability", task.capability}, {"tool_id", outcome.tool_id}});
                const auto* entry = catalog.find(selection.tool_id);
                try {
                    outcome.output = entry->handler(inv);
                } catch (const Error& e) {
                    outcome.status = TaskStatus::Errored;
                    outcome.error = to_task_error(e);
                } catch (const std::exception& e) {
                    outcome.status = TaskStatus::Errored;
                    outcome.error = TaskError{std::string(to_string(ErrorCode::ToolFailure)), e.what()};
                }
                json done = {{"round", options.round}, {"task_id", task.id}, {"status", to_string(outcome.status)}};
                if (outcome.error) {
                    done["error"] = {{"code", outcome.error->code}, {"message", outcome.error->message}};
                } else {
                    done["payload"] = outcome.output.payload;
                }
                emit(options.observer, "task_finished", done);
            } catch (const Error& e) {
                outcome.status = TaskStatus::Errored;
                outcome.error = to_task_error(e);
            }
        }
        if (outcome.error && outcome.error->message.empty()) outcome.error->message = outcome.error->code;
        finished[task.id] = record.outcomes.size();
        record.outcomes.push_back(std::move(outcome));
    }
    return record;
}

} // namespace motionagent::agents
