#pragma once

#include "motionagent/common/json_util.hpp"
#include "motionagent/common/media.hpp"
#include "motionagent/common/query.hpp"

#include <functional>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

namespace motionagent::motioncore {

enum class CostHint { Cheap, ModelCall, MultiModelCall };

std::string_view to_string(CostHint c) noexcept;
CostHint cost_hint_from_string(std::string_view s);

struct InputSlot {
    std::string name;
    /// Semantic type: "media", "text", "analysis", "aggregate", "context", ...
    std::string type;
};

struct ToolDescriptor {
    std::string tool_id;
    std::set<std::string> capabilities;
    std::string description;
    std::vector<InputSlot> input_schema;
    CostHint cost_hint = CostHint::Cheap;

    /// Throws InvalidArgument for an empty id or capability set.
    void validate() const;
};

void to_json(json& j, const ToolDescriptor& d);
void from_json(const json& j, ToolDescriptor& d);

struct ToolOutput {
    /// Human-readable result passed on as generation context.
    std::string payload;
    /// Structured result for downstream tools (candidates, aggregation, ...).
    json data = json::object();
};

/// A meta-task input after binding resolution.
struct ResolvedInput {
    enum class Kind { Media, Literal, Upstream };

    Kind kind = Kind::Literal;
    MediaRef media;
    std::string literal;
    std::string source_task;
    std::string source_tool;
    /// Position of the source task in the round's completion order.
    size_t completion_index = 0;
    ToolOutput output;
};

struct ToolInvocation {
    std::string task_id;
    std::string capability;
    UserQuery query;
    std::vector<ResolvedInput> inputs;

    std::vector<MediaRef> media() const;
    /// Upstream outputs sorted by completion order.
    std::vector<const ResolvedInput*> upstream() const;
    /// Concatenated literal inputs, or the query text when there are none.
    std::string question() const;
};

/// Throws motionagent::Error on failure; the executor records it.
using ToolHandler = std::function<ToolOutput(const ToolInvocation&)>;

struct CatalogEntry {
    ToolDescriptor descriptor;
    ToolHandler handler;
    bool enabled = true;
};

/// Immutable view of the enabled tools at one instant, in registration
/// order. Turns plan and execute against a snapshot so that admin changes
/// only affect later turns.
class ToolCatalog {
public:
    ToolCatalog() = default;
    explicit ToolCatalog(std::vector<CatalogEntry> entries) : entries_(std::move(entries)) {}

    bool empty() const noexcept { return entries_.empty(); }
    size_t size() const noexcept { return entries_.size(); }
    const std::vector<CatalogEntry>& entries() const noexcept { return entries_; }

    const CatalogEntry* find(const std::string& tool_id) const;
    std::vector<const CatalogEntry*> with_capability(const std::string& capability) const;
    bool has_capability(const std::string& capability) const;
    std::set<std::string> capabilities() const;

    json to_json() const;

private:
    std::vector<CatalogEntry> entries_;
};

class ToolRegistry {
public:
    /// Throws DuplicateToolId or InvalidArgument.
    void register_tool(ToolDescriptor descriptor, ToolHandler handler);

    /// Throws UnknownTool.
    void set_enabled(const std::string& tool_id, bool enabled);

    std::optional<ToolDescriptor> resolve(const std::string& tool_id) const;
    /// Enabled tools advertising the capability, in registration order.
    std::vector<ToolDescriptor> resolve_capability(const std::string& capability) const;

    /// All registered tools including disabled ones.
    std::vector<std::pair<ToolDescriptor, bool>> list() const;

    ToolCatalog snapshot() const;

private:
    mutable std::shared_mutex mu_;
    std::vector<CatalogEntry> entries_;
};

} // namespace motionagent::motioncore
