#pragma once

#include "motionagent/backends/backend.hpp"
#include "motionagent/common/prompts.hpp"
#include "motionagent/motioncore/types.hpp"

#include <vector>

namespace motionagent::motioncore {

enum class ClusterMode { ExactMatch, TokenOverlap };

struct ClusterSpec {
    ClusterMode mode = ClusterMode::TokenOverlap;
    double threshold = 0.5;
};

/// Indices into the clustered input, ascending.
using Cluster = std::vector<size_t>;

/// Partitions the results. ExactMatch groups equal normalized texts;
/// TokenOverlap adds single-link edges between results whose token-set
/// Jaccard similarity reaches the threshold. Clusters are ordered by their
/// first member.
std::vector<Cluster> cluster_results(const std::vector<ScoredResult>& results, ClusterSpec spec);

/// True for answers shaped like a multiple-choice option: "b", "(B)",
/// "c.", "option d".
bool is_option_answer(const std::string& text);

/// Default partition used by the confidence mechanism: option-shaped
/// answers only join exact matches, free text clusters by TokenOverlap(0.5).
std::vector<Cluster> default_clusters(const std::vector<ScoredResult>& results);

/// Confidence mechanism. Without a reasoner the result is the max-mass
/// cluster's most confident member. With a reasoner, its reply is accepted
/// only when it names an input answer; otherwise (or on reasoner failure)
/// the deterministic result is returned and flagged degraded.
///
/// Throws EmptyInput.
AggregatedResult aggregate_confidence(const std::vector<ScoredResult>& results,
                                      const backends::BackendHandle& reasoner = nullptr,
                                      const PromptSet& prompts = {});

/// Two-stage motion-aware mechanism: the specialist sees every candidate
/// plus the raw media and proposes r′; the reasoner re-examines r′.
///
/// Throws EmptyInput, PreconditionViolation (specialist cannot read the
/// media), SpecialistFailure (stage 1; the reasoner is not called). A
/// stage-2 failure returns r′ flagged degraded.
AggregatedResult aggregate_motion_aware(const std::vector<ScoredResult>& results, const MediaRef& media,
                                        const backends::BackendHandle& specialist,
                                        const backends::BackendHandle& reasoner, const PromptSet& prompts = {});

/// Whether a specialist of this kind can consume media of this modality.
bool accepts_modality(backends::BackendKind kind, Modality modality);

} // namespace motionagent::motioncore
