#pragma once

#include "motionagent/common/media.hpp"

#include <map>
#include <string>
#include <utility>

namespace motionagent::backends {

/// Predefined per-(model, modality) trust weights, fixed ahead of time and
/// independent of any single prediction. All values lie in [0, 1].
class ConfidenceTable {
public:
    explicit ConfidenceTable(double default_confidence = 0.5);

    /// Throws InvalidArgument for values outside [0, 1].
    void set(const std::string& model_id, Modality modality, double confidence);

    double default_confidence() const noexcept { return default_; }
    const std::map<std::pair<std::string, Modality>, double>& entries() const noexcept { return entries_; }

private:
    std::map<std::pair<std::string, Modality>, double> entries_;
    double default_;
};

/// Exact entry if present, otherwise the table default. Total.
double confidence_for(const std::string& model_id, Modality modality, const ConfidenceTable& table);

/// {"default": d, "entries": [{"model_id", "modality", "confidence"}]}
ConfidenceTable confidence_table_from_json(const json& j);
json to_json(const ConfidenceTable& table);

} // namespace motionagent::backends
