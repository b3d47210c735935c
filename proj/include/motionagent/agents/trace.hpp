#pragma once

#include "motionagent/agents/plan.hpp"
#include "motionagent/common/error.hpp"
#include "motionagent/motioncore/registry.hpp"
#include "motionagent/motioncore/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace motionagent::agents {

enum class Decision { Approve, Reject };
enum class VerdictTarget { Plan, Results, ToolChoice };

struct Verdict {
    Decision decision = Decision::Approve;
    VerdictTarget target = VerdictTarget::Plan;
    std::vector<std::string> reasons;
    std::vector<std::string> revision_hints;

    bool approved() const { return decision == Decision::Approve; }
    static Verdict approve(VerdictTarget target) { return {Decision::Approve, target, {}, {}}; }
};

void to_json(json& j, const Verdict& v);
void from_json(const json& j, Verdict& v);

struct ToolSelection {
    std::string meta_task_id;
    std::string tool_id;
    std::string rationale;
};

void to_json(json& j, const ToolSelection& s);

enum class TaskStatus { Completed, Errored };

struct TaskError {
    /// ErrorCode name, or "UpstreamFailure".
    std::string code;
    std::string message;
};

inline constexpr const char* kUpstreamFailure = "upstream-failure";

struct TaskOutcome {
    std::string task_id;
    std::string capability;
    /// Empty when no tool could be selected.
    std::string tool_id;
    TaskStatus status = TaskStatus::Completed;
    motioncore::ToolOutput output;
    std::optional<TaskError> error;
};

void to_json(json& j, const TaskOutcome& o);

struct RoundRecord {
    int round = 1;
    MetaTaskPlan plan;
    std::vector<Verdict> verdicts;
    std::vector<ToolSelection> selections;
    /// In execution-completion order.
    std::vector<TaskOutcome> outcomes;

    const TaskOutcome* outcome(const std::string& task_id) const;
};

void to_json(json& j, const RoundRecord& r);

enum class TurnStatus { Answered, Failed };

struct ExecutionTrace {
    std::string turn_id;
    std::vector<RoundRecord> rounds;
    TurnStatus final_status = TurnStatus::Failed;
    std::optional<motioncore::AnswerPayload> answer;
    std::optional<TaskError> failure;
};

void to_json(json& j, const ExecutionTrace& t);

/// Stable serialization: sorted keys, two-space indent, trailing newline.
/// Contains no timestamps or latencies, so equal runs give equal bytes.
std::string serialize_trace(const ExecutionTrace& trace);

std::string_view to_string(Decision d) noexcept;
std::string_view to_string(VerdictTarget t) noexcept;
std::string_view to_string(TaskStatus s) noexcept;
std::string_view to_string(TurnStatus s) noexcept;

} // namespace motionagent::agents
