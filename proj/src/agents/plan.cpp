#include "motionagent/agents/plan.hpp"

#include "motionagent/common/error.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace motionagent::agents {

const MetaTask* MetaTaskPlan::find(const std::string& task_id) const {
    for (const auto& t : tasks) {
        if (t.id == task_id) return &t;
    }
    return nullptr;
}

void to_json(json& j, const Objective& o) {
    j = {{"id", o.id}, {"description", o.description}};
    if (o.span) {
        j["span"] = {o.span->first, o.span->second};
    } else {
        j["span"] = "whole-query";
    }
}

void from_json(const json& j, Objective& o) {
    o.id = j.at("id").get<std::string>();
    o.description = value_or(j, "description", std::string{});
    o.span.reset();
    if (auto it = j.find("span"); it != j.end() && it->is_array()) {
        o.span = std::make_pair(it->at(0).get<size_t>(), it->at(1).get<size_t>());
    }
}

void to_json(json& j, const Binding& b) {
    switch (b.kind) {
    case Binding::Kind::Media: j = {{"media", b.media}}; break;
    case Binding::Kind::Literal: j = {{"literal", b.literal}}; break;
    case Binding::Kind::Output: j = {{"output", b.output}}; break;
    }
}

void from_json(const json& j, Binding& b) {
    if (j.contains("media")) {
        b = Binding::of_media(j.at("media").get<MediaRef>());
    } else if (j.contains("literal")) {
        b = Binding::of_literal(j.at("literal").get<std::string>());
    } else if (j.contains("output")) {
        b = Binding::of_output(j.at("output").get<std::string>());
    } else {
        throw json::other_error::create(501, "binding needs one of media, literal, output", &j);
    }
}

void to_json(json& j, const MetaTask& t) {
    j = {{"id", t.id}, {"objective_id", t.objective_id}, {"capability", t.capability}, {"inputs", t.inputs}, {"depends_on", t.depends_on}};
}

void from_json(const json& j, MetaTask& t) {
    t.id = j.at("id").get<std::string>();
    t.objective_id = j.at("objective_id").get<std::string>();
    t.capability = j.at("capability").get<std::string>();
    t.inputs = value_or(j, "inputs", std::vector<Binding>{});
    t.depends_on = value_or(j, "depends_on", std::vector<std::string>{});
}

void to_json(json& j, const MetaTaskPlan& p) {
    j = {{"objectives", p.objectives}, {"tasks", p.tasks}, {"version", p.version}};
}

void from_json(const json& j, MetaTaskPlan& p) {
    p.objectives = j.at("objectives").get<std::vector<Objective>>();
    p.tasks = j.at("tasks").get<std::vector<MetaTask>>();
    p.version = value_or(j, "version", 1);
}

std::optional<std::vector<size_t>> topological_order(const MetaTaskPlan& plan) {
    std::map<std::string, size_t> index;
    for (size_t i = 0; i < plan.tasks.size(); ++i) index.emplace(plan.tasks[i].id, i);
    std::vector<size_t> pending(plan.tasks.size(), 0);
    std::vector<std::vector<size_t>> dependents(plan.tasks.size());
    for (size_t i = 0; i < plan.tasks.size(); ++i) {
        for (const auto& dep : std::set<std::string>(plan.tasks[i].depends_on.begin(), plan.tasks[i].depends_on.end())) {
            auto it = index.find(dep);
            if (it == index.end()) return std::nullopt;
            ++pending[i];
            dependents[it->second].push_back(i);
        }
    }
    std::set<size_t> ready;
    for (size_t i = 0; i < plan.tasks.size(); ++i) {
        if (pending[i] == 0) ready.insert(i);
    }
    std::vector<size_t> order;
    while (!ready.empty()) {
        const size_t i = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(i);
        for (size_t d : dependents[i]) {
            if (--pending[d] == 0) ready.insert(d);
        }
    }
    if (order.size() != plan.tasks.size()) return std::nullopt;
    return order;
}

std::vector<std::string> plan_issues(const MetaTaskPlan& plan, const UserQuery& query, const motioncore::ToolCatalog* catalog) {
    std::vector<std::string> issues;
    if (plan.tasks.empty()) issues.push_back("plan has no meta-tasks");
    if (plan.objectives.empty()) issues.push_back("plan has no objectives");

    std::set<std::string> objective_ids;
    for (const auto& o : plan.objectives) {
        if (o.id.empty()) issues.push_back("objective with empty id");
        if (!objective_ids.insert(o.id).second) issues.push_back("duplicate objective id " + o.id);
        if (o.span && (o.span->first > o.span->second || o.span->second > query.text.size())) {
            issues.push_back("objective " + o.id + " span lies outside the query");
        }
    }

    std::set<std::string> task_ids;
    for (const auto& t : plan.tasks) {
        if (t.id.empty()) issues.push_back("meta-task with empty id");
        if (!task_ids.insert(t.id).second) issues.push_back("duplicate meta-task id " + t.id);
    }

    std::set<std::string> covered;
    bool dangling = false;
    for (const auto& t : plan.tasks) {
        if (!objective_ids.count(t.objective_id)) {
            issues.push_back("meta-task " + t.id + " references unknown objective " + t.objective_id);
        }
        covered.insert(t.objective_id);
        for (const auto& dep : t.depends_on) {
            if (!task_ids.count(dep)) {
                issues.push_back("meta-task " + t.id + " depends on unknown meta-task " + dep);
                dangling = true;
            }
        }
        for (const auto& in : t.inputs) {
            if (in.kind != Binding::Kind::Output) continue;
            if (!task_ids.count(in.output)) {
                issues.push_back("meta-task " + t.id + " consumes output of unknown meta-task " + in.output);
            } else if (std::find(t.depends_on.begin(), t.depends_on.end(), in.output) == t.depends_on.end()) {
                issues.push_back("meta-task " + t.id + " consumes output of " + in.output + " without depending on it");
            }
        }
        if (catalog && !catalog->has_capability(t.capability)) {
            issues.push_back("capability " + t.capability + " is not in the catalog (meta-task " + t.id + ")");
        }
    }
    if (!dangling && !topological_order(plan)) issues.push_back("cycle in meta-task dependencies");
    for (const auto& o : plan.objectives) {
        if (!covered.count(o.id)) issues.push_back("objective " + o.id + " is not covered by any meta-task");
    }
    return issues;
}

} // namespace motionagent::agents
