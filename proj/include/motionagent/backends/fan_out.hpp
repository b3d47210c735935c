#pragma once

#include "motionagent/backends/backend.hpp"
#include "motionagent/backends/clock.hpp"
#include "motionagent/common/error.hpp"

#include <optional>
#include <vector>

namespace motionagent::backends {

enum class OutcomeStatus { Ok, Failed, TimedOut };

std::string_view to_string(OutcomeStatus s) noexcept;

struct FanOutOutcome {
    std::string model_id;
    OutcomeStatus status = OutcomeStatus::TimedOut;
    std::optional<ModelResponse> response;
    std::optional<ErrorCode> error_code;
    std::string error_message;
};

json to_json(const FanOutOutcome& o);

struct FanOutResult {
    /// Same length and order as the input backend list.
    std::vector<FanOutOutcome> outcomes;
    /// Measured on the clock that drove the fan-out.
    Duration elapsed{};

    size_t ok_count() const;
};

/// Starts every invocation before awaiting any, then collects until all
/// have answered or `deadline` has elapsed. Calls still running at the
/// deadline are reported TimedOut and their late results discarded.
///
/// Throws QuorumNotMet (detail: {outcomes, elapsed_ms}) when fewer than
/// `quorum` calls succeed; InvalidArgument unless 1 <= quorum <= |backends|.
FanOutResult fan_out(const std::vector<BackendHandle>& backends, const ModelRequest& request,
                     Duration deadline, size_t quorum, const ClockHandle& clock = real_clock());

} // namespace motionagent::backends
