#pragma once

#include "motionagent/common/json_util.hpp"

#include <map>
#include <string>

namespace motionagent {

/// Role prompts keyed by schema tag. Tags without an override fall back to
/// the built-in text. Prompts are not part of request fingerprints.
class PromptSet {
public:
    PromptSet() = default;
    explicit PromptSet(std::map<std::string, std::string> overrides) : overrides_(std::move(overrides)) {}

    std::string get(const std::string& schema_tag) const;
    const std::map<std::string, std::string>& overrides() const noexcept { return overrides_; }

private:
    std::map<std::string, std::string> overrides_;
};

PromptSet prompt_set_from_json(const json& j);

} // namespace motionagent
