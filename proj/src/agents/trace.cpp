#include "motionagent/agents/trace.hpp"

namespace motionagent::agents {

std::string_view to_string(Decision d) noexcept { return d == Decision::Approve ? "approve" : "reject"; }

std::string_view to_string(VerdictTarget t) noexcept {
    switch (t) {
    case VerdictTarget::Plan: return "plan";
    case VerdictTarget::Results: return "results";
    case VerdictTarget::ToolChoice: return "tool_choice";
    }
    return "plan";
}

std::string_view to_string(TaskStatus s) noexcept { return s == TaskStatus::Completed ? "completed" : "errored"; }
std::string_view to_string(TurnStatus s) noexcept { return s == TurnStatus::Answered ? "answered" : "failed"; }

void to_json(json& j, const Verdict& v) {
    j = {{"decision", to_string(v.decision)},
         {"target", to_string(v.target)},
         {"reasons", v.reasons},
         {"revision_hints", v.revision_hints}};
}

void from_json(const json& j, Verdict& v) {
    v.decision = j.at("decision").get<std::string>() == "approve" ? Decision::Approve : Decision::Reject;
    const auto target = value_or(j, "target", std::string("plan"));
    v.target = target == "results" ? VerdictTarget::Results : target == "tool_choice" ? VerdictTarget::ToolChoice : VerdictTarget::Plan;
    v.reasons = value_or(j, "reasons", std::vector<std::string>{});
    v.revision_hints = value_or(j, "revision_hints", std::vector<std::string>{});
}

void to_json(json& j, const ToolSelection& s) {
    j = {{"meta_task_id", s.meta_task_id}, {"tool_id", s.tool_id}, {"rationale", s.rationale}};
}

void to_json(json& j, const TaskOutcome& o) {
    j = {{"task_id", o.task_id}, {"capability", o.capability}, {"tool_id", o.tool_id}, {"status", to_string(o.status)}};
    if (o.status == TaskStatus::Completed) {
        j["payload"] = o.output.payload;
        j["data"] = o.output.data;
    }
    if (o.error) j["error"] = {{"code", o.error->code}, {"message", o.error->message}};
}

const TaskOutcome* RoundRecord::outcome(const std::string& task_id) const {
    for (const auto& o : outcomes) {
        if (o.task_id == task_id) return &o;
    }
    return nullptr;
}

void to_json(json& j, const RoundRecord& r) {
    j = {{"round", r.round}, {"plan", r.plan}, {"verdicts", r.verdicts}, {"selections", r.selections}, {"outcomes", r.outcomes}};
}

void to_json(json& j, const ExecutionTrace& t) {
    j = {{"turn_id", t.turn_id}, {"rounds", t.rounds}, {"final_status", to_string(t.final_status)}};
    j["answer"] = t.answer ? json(*t.answer) : json(nullptr);
    j["failure"] = t.failure ? json{{"code", t.failure->code}, {"message", t.failure->message}} : json(nullptr);
}

std::string serialize_trace(const ExecutionTrace& trace) { return json(trace).dump(2, ' ', false, json::error_handler_t::replace) + "\n"; }

} // namespace motionagent::agents
