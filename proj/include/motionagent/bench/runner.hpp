#pragma once

#include "motionagent/agents/engine.hpp"
#include "motionagent/bench/dataset.hpp"
#include "motionagent/bench/judge.hpp"
#include "motionagent/bench/report.hpp"

#include <cstdint>
#include <functional>

namespace motionagent::bench {

struct BenchOptions {
    size_t concurrency = 1;
    std::uint64_t seed = 0;
    std::string rubric_version = "v1";
    PromptSet prompts;
    /// Merged into the report metadata (config hash, backend list, ...).
    json metadata = json::object();
    /// Called after each case; calls are serialized.
    std::function<void(const CaseResult&)> on_case;
};

/// Session id for a case; a pure function of seed and case id.
std::string case_session_id(std::uint64_t seed, const std::string& case_id);

/// Scores one case: runs the turn, then judges (FreeQA), matches options
/// (MultipleChoice) or extracts the count (RepCount). Never throws for
/// engine or judge failures; those come back flagged.
CaseResult run_case(const BenchCase& c, const agents::Engine& engine, backends::Backend* judge,
                    const BenchOptions& options);

/// Runs all cases on up to `options.concurrency` workers. Throws
/// InvalidArgument when FreeQA cases are present without a judge, or the
/// cases do not fit the format.
BenchReport run_benchmark(const std::vector<BenchCase>& cases, BenchFormat format, const agents::Engine& engine,
                          backends::BackendHandle judge, const BenchOptions& options);

} // namespace motionagent::bench
