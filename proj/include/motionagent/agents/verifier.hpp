#pragma once

#include "motionagent/agents/plan.hpp"
#include "motionagent/agents/trace.hpp"
#include "motionagent/backends/backend.hpp"
#include "motionagent/common/prompts.hpp"

namespace motionagent::agents {

/// Structural checks first (every failure listed); the reasoner is only
/// consulted for a structurally sound plan. A null reasoner approves.
///
/// Throws ReasonerFailure from the semantic check only.
Verdict verify_plan(const MetaTaskPlan& plan, const UserQuery& query, const motioncore::ToolCatalog& catalog,
                    const backends::BackendHandle& reasoner, const PromptSet& prompts = {});

/// Rejects when any task errored, with one revision hint per failure
/// ("<capability> unavailable" when no tool offered it). Otherwise the
/// reasoner judges adequacy; a null reasoner approves.
///
/// Throws ReasonerFailure.
Verdict verify_results(const RoundRecord& round, const UserQuery& query, const backends::BackendHandle& reasoner,
                       const PromptSet& prompts = {});

/// Parses {"decision", "reasons", "revision_hints"} or a reply starting with
/// "approve"/"reject". Throws ReasonerFailure when neither form matches.
Verdict parse_verdict(const backends::ModelResponse& reply, VerdictTarget target);

} // namespace motionagent::agents
