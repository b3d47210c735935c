#include "motionagent/agents/planner.hpp"

#include "motionagent/common/error.hpp"
#include "motionagent/common/text.hpp"

#include <set>

namespace motionagent::agents {

namespace {

struct Parsed {
    std::optional<MetaTaskPlan> plan;
    std::vector<std::string> issues;
    /// Capabilities the reply used that the catalog does not offer.
    std::set<std::string> missing;
};

Parsed parse_reply(const backends::ModelResponse& reply, const UserQuery& query, const motioncore::ToolCatalog& catalog) {
    std::optional<json> doc;
    if (reply.fields.is_object() && reply.fields.contains("tasks")) {
        doc = reply.fields;
    } else {
        doc = extract_json_object(reply.text);
    }
    if (!doc) return {std::nullopt, {"reply contains no JSON object"}, {}};
    if (auto it = doc->find("error"); it != doc->end() && it->is_string()) return {std::nullopt, {it->get<std::string>()}, {}};
    MetaTaskPlan p;
    try {
        p = doc->get<MetaTaskPlan>();
    } catch (const std::exception& e) {
        return {std::nullopt, {std::string("reply does not match the plan schema: ") + e.what()}, {}};
    }
    auto issues = plan_issues(p, query, &catalog);
    if (issues.empty()) return {std::move(p), {}, {}};
    std::set<std::string> missing;
    for (const auto& t : p.tasks) {
        if (!catalog.has_capability(t.capability)) missing.insert(t.capability);
    }
    return {std::nullopt, std::move(issues), std::move(missing)};
}

backends::ModelResponse call(const backends::BackendHandle& reasoner, const backends::ModelRequest& request) {
    try {
        return reasoner->invoke(request);
    } catch (const Error& e) {
        throw Error(ErrorCode::ReasonerFailure, "planner " + reasoner->model_id() + ": " + e.what(), e.to_json());
    }
}

MetaTaskPlan request_plan(const std::string& tag, json payload, const UserQuery& query,
                          const motioncore::ToolCatalog& catalog, const backends::BackendHandle& reasoner,
                          const PromptSet& prompts) {
    if (!reasoner) throw Error(ErrorCode::PreconditionViolation, "no planner backend configured");
    const auto first = call(reasoner, {prompts.get(tag), payload, tag});
    auto parsed = parse_reply(first, query, catalog);
    if (parsed.plan) return *parsed.plan;

    payload["repair"] = {{"previous", first.text}, {"issues", parsed.issues}};
    const auto second = call(reasoner, {prompts.get(tag), payload, tag});
    auto retry = parse_reply(second, query, catalog);
    if (retry.plan) return *retry.plan;
    // A plan that is sound except for capabilities nobody offers.
    if (!retry.missing.empty() && retry.issues.size() == retry.missing.size()) {
        const std::vector<std::string> missing(retry.missing.begin(), retry.missing.end());
        throw Error(ErrorCode::NoToolAvailable, "no tool offers " + text::join(missing, ", "), {{"capabilities", missing}});
    }
    throw Error(ErrorCode::UndecomposableQuery, "no valid plan after repair: " + text::join(retry.issues, "; "),
                {{"issues", retry.issues}});
}

json query_payload(const UserQuery& query, const motioncore::ToolCatalog& catalog) {
    return {{"query", query.text}, {"attachments", query.attachments}, {"catalog", catalog_payload(catalog)}};
}

} // namespace

json catalog_payload(const motioncore::ToolCatalog& catalog) {
    json out = json::array();
    for (const auto& e : catalog.entries()) {
        out.push_back({{"tool_id", e.descriptor.tool_id},
                       {"capabilities", e.descriptor.capabilities},
                       {"description", e.descriptor.description}});
    }
    return out;
}

MetaTaskPlan plan(const UserQuery& query, const motioncore::ToolCatalog& catalog, const backends::BackendHandle& reasoner,
                  const PromptSet& prompts) {
    if (catalog.empty()) throw Error(ErrorCode::EmptyCatalog, "no tools are registered");
    auto p = request_plan("plan", query_payload(query, catalog), query, catalog, reasoner, prompts);
    p.version = 1;
    return p;
}

MetaTaskPlan replan(const MetaTaskPlan& prior, const Verdict& verdict, const UserQuery& query,
                    const motioncore::ToolCatalog& catalog, const backends::BackendHandle& reasoner,
                    const PromptSet& prompts) {
    if (verdict.approved()) throw Error(ErrorCode::PreconditionViolation, "replan requires a rejecting verdict");
    if (catalog.empty()) throw Error(ErrorCode::EmptyCatalog, "no tools are registered");
    json payload = query_payload(query, catalog);
    payload["prior"] = prior;
    payload["verdict"] = verdict;
    auto p = request_plan("replan", std::move(payload), query, catalog, reasoner, prompts);
    p.version = prior.version + 1;
    return p;
}

} // namespace motionagent::agents
