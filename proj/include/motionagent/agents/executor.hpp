#pragma once

#include "motionagent/agents/plan.hpp"
#include "motionagent/agents/trace.hpp"
#include "motionagent/backends/backend.hpp"
#include "motionagent/common/prompts.hpp"

#include <functional>

namespace motionagent::agents {

/// Receives progress events: plan_ready, task_started, task_finished,
/// verdict, answer, failure.
using TurnObserver = std::function<void(const std::string& event, const json& data)>;

/// Picks the tool for a meta-task. With several candidates the reasoner (if
/// any) chooses; a missing reasoner or an unusable reply falls back to the
/// earliest registered candidate.
///
/// Throws NoToolAvailable, ReasonerFailure.
ToolSelection select_tool(const MetaTask& task, const motioncore::ToolCatalog& catalog,
                          const backends::BackendHandle& reasoner, const PromptSet& prompts = {});

/// Structural check of a selection: the tool exists and serves the task.
Verdict verify_tool_choice(const ToolSelection& selection, const MetaTask& task, const motioncore::ToolCatalog& catalog);

struct ExecutionOptions {
    backends::BackendHandle selector;
    PromptSet prompts;
    TurnObserver observer;
    int round = 1;
};

/// Runs one round: tasks in topological order (ties by plan position). A task
/// whose dependency errored is recorded as errored with "upstream-failure"
/// and not invoked. Only the `selections` and `outcomes` of the returned
/// record are filled in (plus any rejected tool-choice verdicts).
RoundRecord execute_plan(const MetaTaskPlan& plan, const motioncore::ToolCatalog& catalog, const UserQuery& query,
                         const ExecutionOptions& options = {});

} // namespace motionagent::agents
