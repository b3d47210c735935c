#include "motionagent/backends/confidence.hpp"

#include "motionagent/common/error.hpp"

namespace motionagent::backends {

namespace {

void check_unit(double c, const std::string& what) {
    if (!(c >= 0.0 && c <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, what + " confidence " + std::to_string(c) + " outside [0,1]");
    }
}

} // namespace

ConfidenceTable::ConfidenceTable(double default_confidence) : default_(default_confidence) {
    check_unit(default_confidence, "default");
}

void ConfidenceTable::set(const std::string& model_id, Modality modality, double confidence) {
    check_unit(confidence, model_id);
    entries_[{model_id, modality}] = confidence;
}

double confidence_for(const std::string& model_id, Modality modality, const ConfidenceTable& table) {
    auto it = table.entries().find({model_id, modality});
    return it == table.entries().end() ? table.default_confidence() : it->second;
}

ConfidenceTable confidence_table_from_json(const json& j) {
    ConfidenceTable table(value_or(j, "default", 0.5));
    for (const auto& e : value_or(j, "entries", json::array())) {
        table.set(e.at("model_id").get<std::string>(),
                  modality_from_string(e.at("modality").get<std::string>()),
                  e.at("confidence").get<double>());
    }
    return table;
}

json to_json(const ConfidenceTable& table) {
    json entries = json::array();
    for (const auto& [key, c] : table.entries()) {
        entries.push_back({{"model_id", key.first},
                           {"modality", std::string(to_string(key.second))},
                           {"confidence", c}});
    }
    return {{"default", table.default_confidence()}, {"entries", entries}};
}

} // namespace motionagent::backends
