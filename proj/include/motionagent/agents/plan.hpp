#pragma once

#include "motionagent/common/json_util.hpp"
#include "motionagent/common/media.hpp"
#include "motionagent/common/query.hpp"
#include "motionagent/motioncore/registry.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace motionagent::agents {

struct Objective {
    std::string id;
    std::string description;
    /// [start, end) byte offsets into the query text; nullopt = whole query.
    std::optional<std::pair<size_t, size_t>> span;
};

struct Binding {
    enum class Kind { Media, Literal, Output };

    Kind kind = Kind::Literal;
    MediaRef media;
    std::string literal;
    /// Producing meta-task id for Output bindings.
    std::string output;

    static Binding of_media(MediaRef m) { return {Kind::Media, std::move(m), {}, {}}; }
    static Binding of_literal(std::string s) { return {Kind::Literal, {}, std::move(s), {}}; }
    static Binding of_output(std::string id) { return {Kind::Output, {}, {}, std::move(id)}; }
};

struct MetaTask {
    std::string id;
    std::string objective_id;
    std::string capability;
    std::vector<Binding> inputs;
    std::vector<std::string> depends_on;
};

struct MetaTaskPlan {
    std::vector<Objective> objectives;
    std::vector<MetaTask> tasks;
    int version = 1;

    const MetaTask* find(const std::string& task_id) const;
};

void to_json(json& j, const Objective& o);
void from_json(const json& j, Objective& o);
void to_json(json& j, const Binding& b);
void from_json(const json& j, Binding& b);
void to_json(json& j, const MetaTask& t);
void from_json(const json& j, MetaTask& t);
void to_json(json& j, const MetaTaskPlan& p);
void from_json(const json& j, MetaTaskPlan& p);

/// Task indices in a topological order, ties broken by plan position, or
/// nullopt when the dependency graph has a cycle or dangling edge.
std::optional<std::vector<size_t>> topological_order(const MetaTaskPlan& plan);

/// Every violated plan invariant, one message per issue. Capability checks
/// are skipped when `catalog` is null.
std::vector<std::string> plan_issues(const MetaTaskPlan& plan, const UserQuery& query,
                                     const motioncore::ToolCatalog* catalog);

} // namespace motionagent::agents
