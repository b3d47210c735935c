#pragma once

#include "motionagent/agents/plan.hpp"
#include "motionagent/agents/trace.hpp"
#include "motionagent/backends/backend.hpp"
#include "motionagent/common/prompts.hpp"

namespace motionagent::agents {

/// Decomposes the query into objectives and meta-tasks restricted to the
/// catalog's capabilities. A reply that does not parse into a valid plan is
/// re-prompted once with the list of problems.
///
/// Throws EmptyCatalog, ReasonerFailure, UndecomposableQuery.
MetaTaskPlan plan(const UserQuery& query, const motioncore::ToolCatalog& catalog,
                  const backends::BackendHandle& reasoner, const PromptSet& prompts = {});

/// Revises `prior` in response to a rejection. The result has version
/// prior.version + 1.
///
/// Throws PreconditionViolation (verdict approves), ReasonerFailure,
/// UndecomposableQuery.
MetaTaskPlan replan(const MetaTaskPlan& prior, const Verdict& verdict, const UserQuery& query,
                    const motioncore::ToolCatalog& catalog, const backends::BackendHandle& reasoner,
                    const PromptSet& prompts = {});

/// Capability descriptors in the form sent to planning models.
json catalog_payload(const motioncore::ToolCatalog& catalog);

} // namespace motionagent::agents
