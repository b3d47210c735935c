#pragma once

#include "motionagent/backends/backend.hpp"
#include "motionagent/common/prompts.hpp"
#include "motionagent/motioncore/types.hpp"

namespace motionagent::motioncore {

/// Combines the accumulated context with the user's request into the final
/// answer. The reasoner receives the entries in completion order.
///
/// Throws EmptyContext, ReasonerFailure.
AnswerPayload generate_answer(const GenerationContext& context, const backends::BackendHandle& reasoner,
                              const PromptSet& prompts = {});

} // namespace motionagent::motioncore
