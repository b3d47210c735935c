#pragma once

#include <nlohmann/json.hpp>

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Event = std::pair<std::string, nlohmann::json>;

/// Checks the streamed-event invariant. Returns the first violation, or an
/// empty string: plan_ready precedes any task_started of its round, every
/// task_finished follows its own task_started, and exactly one answer or
/// failure event closes the stream.
inline std::string event_order_violation(const std::vector<Event>& events) {
    std::set<int> planned;
    std::set<std::pair<int, std::string>> started;
    std::set<std::pair<int, std::string>> finished;
    for (size_t i = 0; i < events.size(); ++i) {
        const auto& [name, data] = events[i];
        const bool terminal = name == "answer" || name == "failure";
        if (terminal) {
            if (i + 1 != events.size()) return "terminal event '" + name + "' is not last";
            continue;
        }
        const int round = data.value("round", -1);
        if (name == "plan_ready") {
            planned.insert(round);
        } else if (name == "task_started") {
            if (!planned.count(round)) return "task_started before plan_ready in round " + std::to_string(round);
            if (!started.insert({round, data.value("task_id", "")}).second) return "task started twice";
        } else if (name == "task_finished") {
            const std::pair<int, std::string> key{round, data.value("task_id", "")};
            if (!started.count(key)) return "task_finished without task_started: " + key.second;
            if (!finished.insert(key).second) return "task finished twice: " + key.second;
        } else if (name != "verdict") {
            return "unknown event '" + name + "'";
        }
    }
    if (events.empty()) return "no events";
    const auto& last = events.back().first;
    if (last != "answer" && last != "failure") return "stream has no terminal event";
    return {};
}

/// Splits a text/event-stream body into (event, data) pairs.
inline std::vector<Event> parse_sse(const std::string& body) {
    std::vector<Event> out;
    size_t pos = 0;
    while (pos < body.size()) {
        auto end = body.find("\n\n", pos);
        if (end == std::string::npos) end = body.size();
        const auto frame = body.substr(pos, end - pos);
        pos = end + 2;
        std::string name, data;
        size_t p = 0;
        while (p < frame.size()) {
            auto nl = frame.find('\n', p);
            if (nl == std::string::npos) nl = frame.size();
            const auto line = frame.substr(p, nl - p);
            if (line.rfind("event: ", 0) == 0) name = line.substr(7);
            if (line.rfind("data: ", 0) == 0) data += line.substr(6);
            p = nl + 1;
        }
        if (!name.empty()) out.emplace_back(name, nlohmann::json::parse(data, nullptr, false));
    }
    return out;
}

} // namespace oracle
