#pragma once

#include "motionagent/backends/clock.hpp"
#include "motionagent/backends/confidence.hpp"
#include "motionagent/backends/fan_out.hpp"
#include "motionagent/common/prompts.hpp"
#include "motionagent/motioncore/types.hpp"

#include <vector>

namespace motionagent::motioncore {

/// Sends the request to every model at once and scores each answer with the
/// model's predefined confidence for the request modality. Failed and
/// timed-out models are omitted.
///
/// Throws QuorumNotMet (detail: per-model outcomes and elapsed time), InvalidArgument.
std::vector<ScoredResult> analyze(const AnalysisRequest& request, const std::vector<backends::BackendHandle>& models,
                                  const backends::ConfidenceTable& table, backends::Duration deadline, size_t quorum,
                                  const backends::ClockHandle& clock = backends::real_clock(),
                                  const PromptSet& prompts = {}, const std::string& task = "describe");

} // namespace motionagent::motioncore
