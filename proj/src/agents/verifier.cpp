#include "motionagent/agents/verifier.hpp"

#include "motionagent/common/error.hpp"
#include "motionagent/common/text.hpp"

namespace motionagent::agents {

namespace {

Verdict ask(const backends::BackendHandle& reasoner, const std::string& tag, const json& payload, VerdictTarget target,
            const PromptSet& prompts) {
    backends::ModelResponse reply;
    try {
        reply = reasoner->invoke({prompts.get(tag), payload, tag});
    } catch (const Error& e) {
        throw Error(ErrorCode::ReasonerFailure, "verifier " + reasoner->model_id() + ": " + e.what(), e.to_json());
    }
    return parse_verdict(reply, target);
}

} // namespace

Verdict parse_verdict(const backends::ModelResponse& reply, VerdictTarget target) {
    Verdict v;
    v.target = target;
    std::optional<json> doc;
    if (reply.fields.is_object() && reply.fields.contains("decision")) {
        doc = reply.fields;
    } else {
        doc = extract_json_object(reply.text);
    }
    std::string decision;
    if (doc && doc->contains("decision") && (*doc)["decision"].is_string()) {
        decision = text::normalize((*doc)["decision"].get<std::string>());
        try {
            v.reasons = value_or(*doc, "reasons", std::vector<std::string>{});
            v.revision_hints = value_or(*doc, "revision_hints", std::vector<std::string>{});
        } catch (const json::exception&) {
            throw Error(ErrorCode::ReasonerFailure, "verdict reasons must be lists of strings");
        }
    } else {
        const std::string t = text::trim(reply.text);
        size_t end = 0;
        while (end < t.size() && std::isalpha(static_cast<unsigned char>(t[end]))) ++end;
        decision = text::to_lower(t.substr(0, end));
        std::string rest = t.substr(end);
        rest.erase(0, rest.find_first_not_of(" \t\n:-,."));
        if (!rest.empty()) v.reasons.push_back(text::trim(rest));
    }
    if (decision == "approve" || decision == "approved") {
        v.decision = Decision::Approve;
    } else if (decision == "reject" || decision == "rejected") {
        v.decision = Decision::Reject;
        if (v.reasons.empty()) v.reasons.push_back("rejected by verifier");
    } else {
        throw Error(ErrorCode::ReasonerFailure, "unrecognised verdict: " + reply.text.substr(0, 200));
    }
    return v;
}

Verdict verify_plan(const MetaTaskPlan& plan, const UserQuery& query, const motioncore::ToolCatalog& catalog,
                    const backends::BackendHandle& reasoner, const PromptSet& prompts) {
    auto issues = plan_issues(plan, query, &catalog);
    if (!issues.empty()) {
        Verdict v{Decision::Reject, VerdictTarget::Plan, issues, {}};
        for (const auto& t : plan.tasks) {
            if (!catalog.has_capability(t.capability)) v.revision_hints.push_back(t.capability + " unavailable");
        }
        return v;
    }
    if (!reasoner) return Verdict::approve(VerdictTarget::Plan);
    return ask(reasoner, "verify_plan", {{"query", query.text}, {"plan", plan}}, VerdictTarget::Plan, prompts);
}

Verdict verify_results(const RoundRecord& round, const UserQuery& query, const backends::BackendHandle& reasoner,
                       const PromptSet& prompts) {
    Verdict reject{Decision::Reject, VerdictTarget::Results, {}, {}};
    for (const auto& o : round.outcomes) {
        if (o.status != TaskStatus::Errored) continue;
        const std::string info = o.error ? o.error->code + ": " + o.error->message : "unknown error";
        reject.reasons.push_back("task " + o.task_id + " (" + o.capability + ") failed: " + info);
        if (o.error && o.error->message == kUpstreamFailure) continue;
        if (o.error && o.error->code == to_string(ErrorCode::NoToolAvailable)) {
            reject.revision_hints.push_back(o.capability + " unavailable");
        } else {
            reject.revision_hints.push_back("task " + o.task_id + " (" + o.capability + ") failed: " + info);
        }
    }
    if (!reject.reasons.empty()) return reject;
    if (!reasoner) return Verdict::approve(VerdictTarget::Results);

    json outcomes = json::array();
    for (const auto& o : round.outcomes) {
        outcomes.push_back({{"task_id", o.task_id}, {"capability", o.capability}, {"payload", o.output.payload}});
    }
    return ask(reasoner, "verify_results", {{"query", query.text}, {"outcomes", std::move(outcomes)}},
               VerdictTarget::Results, prompts);
}

} // namespace motionagent::agents
