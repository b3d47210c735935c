#pragma once

#include "motionagent/backends/backend.hpp"
#include "motionagent/backends/clock.hpp"
#include "motionagent/backends/confidence.hpp"
#include "motionagent/common/prompts.hpp"
#include "motionagent/motioncore/registry.hpp"
#include "motionagent/motioncore/retrieval.hpp"
#include "motionagent/motioncore/types.hpp"

#include <chrono>
#include <memory>
#include <string>
#include <vector>

namespace motionagent::motioncore {

/// Everything the builtin tools need at call time.
struct MotionCoreSettings {
    std::vector<backends::BackendHandle> analyzers;
    backends::ConfidenceTable confidence;
    backends::Duration deadline = std::chrono::seconds(30);
    size_t quorum = 1;
    backends::ClockHandle clock = backends::real_clock();

    AggregationMethod aggregation = AggregationMethod::ConfidenceMechanism;
    /// Optional for the confidence mechanism; the stage-2 model otherwise.
    backends::BackendHandle aggregator;
    /// Stage-1 model of the motion-aware mechanism.
    backends::BackendHandle specialist;
    backends::BackendHandle generator;
    backends::BackendHandle embedder;
    std::shared_ptr<const MotionStore> store;
    std::shared_ptr<const KnowledgeBase> knowledge;
    PromptSet prompts;
    size_t retrieve_k = 3;
    size_t knowledge_k = 2;
};

/// Names of the builtin tools; each name is also the capability it serves.
const std::vector<std::string>& builtin_tool_names();

/// Throws UnknownTool for a name outside builtin_tool_names().
ToolDescriptor builtin_descriptor(const std::string& name);
ToolHandler builtin_handler(const std::string& name, std::shared_ptr<const MotionCoreSettings> settings);

/// Whether the settings provide what the builtin needs (models, store, ...).
bool builtin_available(const std::string& name, const MotionCoreSettings& settings);

/// Registers every available builtin under its default descriptor.
void register_builtin_tools(ToolRegistry& registry, std::shared_ptr<const MotionCoreSettings> settings);

/// Tool backed directly by one model: the request carries the question,
/// attached media and upstream payloads under schema tag "tool:<tool_id>".
ToolHandler backend_tool_handler(const std::string& tool_id, backends::BackendHandle backend, PromptSet prompts = {});

} // namespace motionagent::motioncore
