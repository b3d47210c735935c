#include "motionagent/common/error.hpp"

namespace motionagent {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::PreconditionViolation: return "PreconditionViolation";
        case ErrorCode::EmptyCatalog: return "EmptyCatalog";
        case ErrorCode::ReasonerFailure: return "ReasonerFailure";
        case ErrorCode::UndecomposableQuery: return "UndecomposableQuery";
        case ErrorCode::NoToolAvailable: return "NoToolAvailable";
        case ErrorCode::InvalidPlan: return "InvalidPlan";
        case ErrorCode::RoundBudgetExhausted: return "RoundBudgetExhausted";
        case ErrorCode::ToolFailure: return "ToolFailure";
        case ErrorCode::DuplicateToolId: return "DuplicateToolId";
        case ErrorCode::UnknownTool: return "UnknownTool";
        case ErrorCode::QuorumNotMet: return "QuorumNotMet";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::SpecialistFailure: return "SpecialistFailure";
        case ErrorCode::EmptyContext: return "EmptyContext";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::EmptyStore: return "EmptyStore";
        case ErrorCode::EmptyKnowledgeBase: return "EmptyKnowledgeBase";
        case ErrorCode::Timeout: return "Timeout";
        case ErrorCode::TransportError: return "TransportError";
        case ErrorCode::MalformedResponse: return "MalformedResponse";
        case ErrorCode::ScriptExhausted: return "ScriptExhausted";
        case ErrorCode::CassetteMismatch: return "CassetteMismatch";
        case ErrorCode::SinkUnwritable: return "SinkUnwritable";
        case ErrorCode::StorageError: return "StorageError";
        case ErrorCode::SessionNotFound: return "SessionNotFound";
        case ErrorCode::TurnNotFound: return "TurnNotFound";
        case ErrorCode::MediaTooLarge: return "MediaTooLarge";
        case ErrorCode::Unauthorized: return "Unauthorized";
        case ErrorCode::Conflict: return "Conflict";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::UnknownFormat: return "UnknownFormat";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::JudgeParseError: return "JudgeParseError";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, nlohmann::json detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      message_(message),
      detail_(std::move(detail)) {}

nlohmann::json Error::to_json() const {
    nlohmann::json j = {{"code", std::string(to_string(code_))}, {"message", message_}};
    if (!detail_.is_null()) j["detail"] = detail_;
    return j;
}

} // namespace motionagent
