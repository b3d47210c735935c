#pragma once

#include "motionagent/agents/executor.hpp"
#include "motionagent/agents/trace.hpp"
#include "motionagent/backends/backend.hpp"
#include "motionagent/common/prompts.hpp"
#include "motionagent/motioncore/registry.hpp"

#include <memory>
#include <optional>

namespace motionagent::agents {

/// Shared, read-mostly orchestration state. One engine serves many
/// concurrent sessions; each turn works on its own catalog snapshot.
struct Engine {
    std::shared_ptr<motioncore::ToolRegistry> registry = std::make_shared<motioncore::ToolRegistry>();
    backends::BackendHandle planner;
    /// Semantic plan/result checks; null means structural checks only.
    backends::BackendHandle verifier;
    /// Chooses among several tools for one capability; null = first registered.
    backends::BackendHandle selector;
    /// Writes the answer when an approved plan has no generate_answer task.
    backends::BackendHandle generator;
    PromptSet prompts;
    int round_budget = 3;
};

using EngineHandle = std::shared_ptr<const Engine>;

struct TurnOutcome {
    std::optional<motioncore::AnswerPayload> answer;
    ExecutionTrace trace;
    std::optional<Error> failure;

    bool answered() const { return trace.final_status == TurnStatus::Answered; }
};

/// plan -> verify_plan -> execute -> verify_results, replanning after each
/// rejection until approval or the round budget runs out. Never throws for
/// pipeline failures: they come back as a Failed trace (RoundBudgetExhausted
/// after the last rejected round; the planner's error when planning fails).
///
/// Throws InvalidArgument for an invalid query or budget.
TurnOutcome run_session_turn(const UserQuery& query, const Engine& engine, const TurnObserver& observer = {});

} // namespace motionagent::agents
