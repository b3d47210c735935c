#pragma once

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace motionagent {

enum class ErrorCode {
    InvalidArgument,
    PreconditionViolation,
    // agents
    EmptyCatalog,
    ReasonerFailure,
    UndecomposableQuery,
    NoToolAvailable,
    InvalidPlan,
    RoundBudgetExhausted,
    ToolFailure,
    // motioncore
    DuplicateToolId,
    UnknownTool,
    QuorumNotMet,
    EmptyInput,
    SpecialistFailure,
    EmptyContext,
    DimensionMismatch,
    EmptyStore,
    EmptyKnowledgeBase,
    // backends
    Timeout,
    TransportError,
    MalformedResponse,
    ScriptExhausted,
    CassetteMismatch,
    SinkUnwritable,
    // service
    StorageError,
    SessionNotFound,
    TurnNotFound,
    MediaTooLarge,
    Unauthorized,
    Conflict,
    ConfigInvalid,
    // benchharness
    UnknownFormat,
    ValidationError,
    JudgeParseError,
    LengthMismatch,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code and optional structured detail
/// (per-model failures, validation line numbers, and so on).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, nlohmann::json detail = nullptr);

    ErrorCode code() const noexcept { return code_; }
    const std::string& message() const noexcept { return message_; }
    const nlohmann::json& detail() const noexcept { return detail_; }

    nlohmann::json to_json() const;

private:
    ErrorCode code_;
    std::string message_;
    nlohmann::json detail_;
};

} // namespace motionagent
