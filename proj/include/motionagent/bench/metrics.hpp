#pragma once

#include "motionagent/bench/dataset.hpp"

#include <optional>
#include <string>
#include <vector>

namespace motionagent::bench {

/// Index of the option the prediction selects. Rules, first one with
/// exactly one hit wins: leading option letter ("B", "(b)", "B) ...",
/// "option b"), exact normalized option text, unique option text contained
/// in the prediction as a whole-word run.
std::optional<size_t> match_option(const std::string& prediction, const std::vector<ChoiceOption>& options);

bool eval_multiple_choice(const std::string& prediction, const std::vector<ChoiceOption>& options,
                          const std::string& ground_truth_id);

struct RepCountMetrics {
    double obo = 0;
    double obz = 0;
    double mae = 0;
    double rmse = 0;
};

/// OBO: share with |p - t| <= 1. OBZ: share with p == t.
/// MAE: mean of |p - t| / max(t, 1). RMSE: sqrt(mean((p - t)^2)).
/// Errors: EmptyInput, LengthMismatch, InvalidArgument for a negative truth.
RepCountMetrics repcount_metrics(const std::vector<long long>& predictions, const std::vector<long long>& truths);

} // namespace motionagent::bench
