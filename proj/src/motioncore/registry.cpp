#include "motionagent/motioncore/registry.hpp"

#include "motionagent/common/error.hpp"
#include "motionagent/common/text.hpp"

#include <algorithm>
#include <mutex>

namespace motionagent::motioncore {

std::string_view to_string(CostHint c) noexcept {
    switch (c) {
    case CostHint::Cheap: return "cheap";
    case CostHint::ModelCall: return "model_call";
    case CostHint::MultiModelCall: return "multi_model_call";
    }
    return "cheap";
}

CostHint cost_hint_from_string(std::string_view s) {
    if (s == "cheap") return CostHint::Cheap;
    if (s == "model_call") return CostHint::ModelCall;
    if (s == "multi_model_call") return CostHint::MultiModelCall;
    throw Error(ErrorCode::InvalidArgument, "unknown cost hint '" + std::string(s) + "'");
}

void ToolDescriptor::validate() const {
    if (text::trim(tool_id).empty()) throw Error(ErrorCode::InvalidArgument, "tool id must not be empty");
    if (capabilities.empty()) throw Error(ErrorCode::InvalidArgument, "tool " + tool_id + " has no capabilities");
    for (const auto& c : capabilities) {
        if (text::trim(c).empty()) throw Error(ErrorCode::InvalidArgument, "tool " + tool_id + " has a blank capability");
    }
}

void to_json(json& j, const ToolDescriptor& d) {
    json slots = json::array();
    for (const auto& s : d.input_schema) slots.push_back({{"name", s.name}, {"type", s.type}});
    j = {{"tool_id", d.tool_id},
         {"capabilities", d.capabilities},
         {"description", d.description},
         {"input_schema", std::move(slots)},
         {"cost_hint", to_string(d.cost_hint)}};
}

void from_json(const json& j, ToolDescriptor& d) {
    try {
        d.tool_id = j.at("tool_id").get<std::string>();
        d.capabilities = j.at("capabilities").get<std::set<std::string>>();
        d.description = value_or(j, "description", std::string{});
        d.input_schema.clear();
        if (auto it = j.find("input_schema"); it != j.end()) {
            for (const auto& s : *it) d.input_schema.push_back({s.at("name").get<std::string>(), s.at("type").get<std::string>()});
        }
        d.cost_hint = cost_hint_from_string(value_or(j, "cost_hint", std::string("cheap")));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("malformed tool descriptor: ") + e.what());
    }
    d.validate();
}

std::vector<MediaRef> ToolInvocation::media() const {
    std::vector<MediaRef> out;
    for (const auto& in : inputs) {
        if (in.kind == ResolvedInput::Kind::Media) out.push_back(in.media);
    }
    return out;
}

std::vector<const ResolvedInput*> ToolInvocation::upstream() const {
    std::vector<const ResolvedInput*> out;
    for (const auto& in : inputs) {
        if (in.kind == ResolvedInput::Kind::Upstream) out.push_back(&in);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const ResolvedInput* a, const ResolvedInput* b) { return a->completion_index < b->completion_index; });
    return out;
}

std::string ToolInvocation::question() const {
    std::vector<std::string> literals;
    for (const auto& in : inputs) {
        if (in.kind == ResolvedInput::Kind::Literal && !text::trim(in.literal).empty()) literals.push_back(in.literal);
    }
    return literals.empty() ? query.text : text::join(literals, " ");
}

const CatalogEntry* ToolCatalog::find(const std::string& tool_id) const {
    for (const auto& e : entries_) {
        if (e.descriptor.tool_id == tool_id) return &e;
    }
    return nullptr;
}

std::vector<const CatalogEntry*> ToolCatalog::with_capability(const std::string& capability) const {
    std::vector<const CatalogEntry*> out;
    for (const auto& e : entries_) {
        if (e.descriptor.capabilities.count(capability)) out.push_back(&e);
    }
    return out;
}

bool ToolCatalog::has_capability(const std::string& capability) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const CatalogEntry& e) { return e.descriptor.capabilities.count(capability) > 0; });
}

std::set<std::string> ToolCatalog::capabilities() const {
    std::set<std::string> out;
    for (const auto& e : entries_) out.insert(e.descriptor.capabilities.begin(), e.descriptor.capabilities.end());
    return out;
}

json ToolCatalog::to_json() const {
    json out = json::array();
    for (const auto& e : entries_) out.push_back(e.descriptor);
    return out;
}

void ToolRegistry::register_tool(ToolDescriptor descriptor, ToolHandler handler) {
    descriptor.validate();
    if (!handler) throw Error(ErrorCode::InvalidArgument, "tool " + descriptor.tool_id + " has no handler");
    std::unique_lock lock(mu_);
    for (const auto& e : entries_) {
        if (e.descriptor.tool_id == descriptor.tool_id) {
            throw Error(ErrorCode::DuplicateToolId, "tool '" + descriptor.tool_id + "' is already registered");
        }
    }
    entries_.push_back({std::move(descriptor), std::move(handler), true});
}

void ToolRegistry::set_enabled(const std::string& tool_id, bool enabled) {
    std::unique_lock lock(mu_);
    for (auto& e : entries_) {
        if (e.descriptor.tool_id == tool_id) {
            e.enabled = enabled;
            return;
        }
    }
    throw Error(ErrorCode::UnknownTool, "no tool '" + tool_id + "'");
}

std::optional<ToolDescriptor> ToolRegistry::resolve(const std::string& tool_id) const {
    std::shared_lock lock(mu_);
    for (const auto& e : entries_) {
        if (e.descriptor.tool_id == tool_id) return e.descriptor;
    }
    return std::nullopt;
}

std::vector<ToolDescriptor> ToolRegistry::resolve_capability(const std::string& capability) const {
    std::shared_lock lock(mu_);
    std::vector<ToolDescriptor> out;
    for (const auto& e : entries_) {
        if (e.enabled && e.descriptor.capabilities.count(capability)) out.push_back(e.descriptor);
    }
    return out;
}

std::vector<std::pair<ToolDescriptor, bool>> ToolRegistry::list() const {
    std::shared_lock lock(mu_);
    std::vector<std::pair<ToolDescriptor, bool>> out;
    for (const auto& e : entries_) out.emplace_back(e.descriptor, e.enabled);
    return out;
}

ToolCatalog ToolRegistry::snapshot() const {
    std::shared_lock lock(mu_);
    std::vector<CatalogEntry> enabled;
    for (const auto& e : entries_) {
        if (e.enabled) enabled.push_back(e);
    }
    return ToolCatalog(std::move(enabled));
}

} // namespace motionagent::motioncore
