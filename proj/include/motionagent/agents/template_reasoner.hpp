#pragma once

#include "motionagent/backends/backend.hpp"

#include <set>

namespace motionagent::agents {

/// Deterministic rule-based reasoner. It answers every orchestration
/// request (plan, replan, select_tool, verify_plan, verify_results,
/// aggregate, motion_aware_estimate, motion_aware_refine, generate) from
/// the request payload alone, so pipelines run reproducibly without a model.
///
/// Planning rules, per sentence of the query:
///   counting words ("how many", "count", "repetition", "reps")
///       -> count_repetitions (analyze_motion if not offered)
///   retrieval words ("find", "retrieve", "similar", "search") -> retrieve_motion
///   knowledge words ("why", "muscle", "technique", "explain", "benefit",
///                    "injur", "should") -> lookup_knowledge
///   analysis runs when media is attached or no other intent matched (it is
///   planned even when the catalog lacks it, so the planner reports the
///   missing tool), and is followed by aggregate when offered. One generate_answer task, owned by
///   the last objective, consumes every terminal task.
///
/// Replanning applies the substitution table to capabilities named in
/// "<capability> unavailable" hints: count_repetitions -> analyze_motion,
/// retrieve_motion -> analyze_motion, lookup_knowledge -> dropped. Without
/// such hints the prior plan is resubmitted unchanged.
class TemplateReasoner final : public backends::Backend {
public:
    explicit TemplateReasoner(std::string model_id = "template-reasoner");

    backends::ModelResponse invoke(const backends::ModelRequest& request) override;
};

/// Plan document for a query, or {"error": ...} when no generate_answer
/// capability is offered or nothing else applies.
json template_plan(const std::string& query, bool has_media, const json& attachments,
                   const std::set<std::string>& capabilities);

json template_replan(const json& prior, const json& verdict, const std::set<std::string>& capabilities);

} // namespace motionagent::agents
