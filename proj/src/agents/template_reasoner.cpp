#include "motionagent/agents/template_reasoner.hpp"

#include "motionagent/agents/plan.hpp"
#include "motionagent/common/error.hpp"
#include "motionagent/common/text.hpp"

#include <algorithm>
#include <map>

namespace motionagent::agents {

namespace {

struct Sentence {
    size_t start;
    size_t end;
};

std::vector<Sentence> sentences(const std::string& q) {
    std::vector<Sentence> out;
    auto push = [&](size_t b, size_t e) {
        while (b < e && std::isspace(static_cast<unsigned char>(q[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(q[e - 1]))) --e;
        if (b < e) out.push_back({b, e});
    };
    size_t begin = 0;
    for (size_t i = 0; i < q.size(); ++i) {
        const char c = q[i];
        const bool boundary_next = i + 1 == q.size() || std::isspace(static_cast<unsigned char>(q[i + 1]));
        if (c == '\n' || ((c == '.' || c == '?' || c == '!') && boundary_next)) {
            push(begin, i + 1);
            begin = i + 1;
        }
    }
    push(begin, q.size());
    return out;
}

bool mentions(const std::string& lower, std::initializer_list<const char*> words) {
    const auto tokens = text::tokenize(lower);
    for (const char* w : words) {
        const std::string word(w);
        if (word.find(' ') != std::string::npos) {
            if (lower.find(word) != std::string::npos) return true;
            continue;
        }
        for (const auto& t : tokens) {
            if (t == word || (word == "injur" && text::starts_with(t, word)) ||
                (word != "injur" && t.size() > word.size() && text::starts_with(t, word) &&
                 (t == word + "s" || t == word + "ing" || t == word + "ed"))) {
                return true;
            }
        }
    }
    return false;
}

json error_doc(const std::string& why) { return {{"error", why}}; }

std::string top_candidate(const json& candidates) {
    const json* best = nullptr;
    for (const auto& c : candidates) {
        if (!best) {
            best = &c;
            continue;
        }
        const double a = c.at("confidence").get<double>(), b = best->at("confidence").get<double>();
        const auto ta = text::normalize(c.at("text").get<std::string>());
        const auto tb = text::normalize(best->at("text").get<std::string>());
        if (a > b || (a == b && ta < tb)) best = &c;
    }
    return best ? best->at("text").get<std::string>() : std::string{};
}

backends::ModelResponse respond_json(const json& doc) {
    backends::ModelResponse r;
    r.text = doc.dump();
    return r;
}

backends::ModelResponse respond_text(std::string text) {
    backends::ModelResponse r;
    r.text = std::move(text);
    return r;
}

std::set<std::string> capabilities_of(const json& catalog) {
    std::set<std::string> caps;
    for (const auto& t : catalog) {
        for (const auto& c : t.at("capabilities")) caps.insert(c.get<std::string>());
    }
    return caps;
}

} // namespace

json template_plan(const std::string& query, bool has_media, const json& attachments,
                   const std::set<std::string>& caps) {
    if (!caps.count("generate_answer")) return error_doc("no generate_answer capability in the catalog");
    MetaTaskPlan plan;
    int next = 1;
    auto new_id = [&] { return "t" + std::to_string(next++); };
    std::set<std::string> consumed;

    for (const auto& s : sentences(query)) {
        const std::string part = query.substr(s.start, s.end - s.start);
        const std::string lower = text::to_lower(part);
        const bool counting = mentions(lower, {"how many", "count", "repetition", "reps"});
        const bool retrieval = caps.count("retrieve_motion") && mentions(lower, {"find", "retrieve", "similar", "search"});
        const bool knowledge = caps.count("lookup_knowledge") &&
                               mentions(lower, {"why", "muscle", "technique", "explain", "benefit", "injur", "should"});

        Objective obj{"o" + std::to_string(plan.objectives.size() + 1), part, std::make_pair(s.start, s.end)};
        std::vector<MetaTask> tasks;
        if (has_media || (!retrieval && !knowledge)) {
            // Planned even when the catalog lacks it: the planner then reports
            // the missing tool instead of an undecomposable query.
            const std::string cap = counting && caps.count("count_repetitions") ? "count_repetitions" : "analyze_motion";
            {
                MetaTask analysis{new_id(), obj.id, cap, {}, {}};
                for (const auto& m : attachments) analysis.inputs.push_back(Binding::of_media(m.get<MediaRef>()));
                analysis.inputs.push_back(Binding::of_literal(part));
                tasks.push_back(analysis);
                if (caps.count("aggregate")) {
                    tasks.push_back({new_id(), obj.id, "aggregate", {Binding::of_output(analysis.id)}, {analysis.id}});
                    consumed.insert(analysis.id);
                }
            }
        }
        if (retrieval) tasks.push_back({new_id(), obj.id, "retrieve_motion", {Binding::of_literal(part)}, {}});
        if (knowledge) tasks.push_back({new_id(), obj.id, "lookup_knowledge", {Binding::of_literal(part)}, {}});
        if (tasks.empty()) continue;
        plan.objectives.push_back(obj);
        plan.tasks.insert(plan.tasks.end(), tasks.begin(), tasks.end());
    }
    if (plan.tasks.empty()) return error_doc("no capability in the catalog applies to the query");

    MetaTask gen{new_id(), plan.objectives.back().id, "generate_answer", {}, {}};
    for (const auto& t : plan.tasks) {
        if (consumed.count(t.id)) continue;
        gen.inputs.push_back(Binding::of_output(t.id));
        gen.depends_on.push_back(t.id);
    }
    plan.tasks.push_back(gen);
    json doc = plan;
    doc.erase("version");
    return doc;
}

json template_replan(const json& prior_doc, const json& verdict, const std::set<std::string>& caps) {
    MetaTaskPlan plan = prior_doc.get<MetaTaskPlan>();
    std::set<std::string> unavailable;
    for (const auto& h : value_or(verdict, "revision_hints", std::vector<std::string>{})) {
        const std::string suffix = " unavailable";
        if (h.size() > suffix.size() && h.compare(h.size() - suffix.size(), suffix.size(), suffix) == 0) {
            unavailable.insert(h.substr(0, h.size() - suffix.size()));
        }
    }
    for (const auto& t : plan.tasks) {
        if (!caps.count(t.capability)) unavailable.insert(t.capability);
    }

    static const std::map<std::string, std::string> substitute = {{"count_repetitions", "analyze_motion"},
                                                                  {"retrieve_motion", "analyze_motion"}};
    std::set<std::string> dropped;
    for (auto& t : plan.tasks) {
        if (!unavailable.count(t.capability)) continue;
        auto it = substitute.find(t.capability);
        if (it != substitute.end() && caps.count(it->second) && !unavailable.count(it->second)) {
            t.capability = it->second;
        } else {
            dropped.insert(t.id);
        }
    }
    // Dropping a task drops everything that can no longer run without it,
    // except the final generation step, which just loses that input.
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& t : plan.tasks) {
            if (dropped.count(t.id) || t.capability == "generate_answer") continue;
            for (const auto& d : t.depends_on) {
                if (dropped.count(d)) {
                    dropped.insert(t.id);
                    changed = true;
                    break;
                }
            }
        }
    }
    std::vector<MetaTask> kept;
    for (auto t : plan.tasks) {
        if (dropped.count(t.id)) continue;
        std::erase_if(t.depends_on, [&](const std::string& d) { return dropped.count(d) > 0; });
        std::erase_if(t.inputs, [&](const Binding& b) { return b.kind == Binding::Kind::Output && dropped.count(b.output); });
        kept.push_back(std::move(t));
    }
    plan.tasks = std::move(kept);

    std::set<std::string> covered;
    for (const auto& t : plan.tasks) {
        if (t.capability != "generate_answer") covered.insert(t.objective_id);
    }
    if (covered.empty()) return error_doc("no remaining capability can serve the query");
    std::erase_if(plan.objectives, [&](const Objective& o) { return !covered.count(o.id); });
    for (auto& t : plan.tasks) {
        if (t.capability == "generate_answer" && !covered.count(t.objective_id)) t.objective_id = plan.objectives.back().id;
    }
    json doc = plan;
    doc.erase("version");
    return doc;
}

TemplateReasoner::TemplateReasoner(std::string model_id)
    : Backend({std::move(model_id), backends::BackendKind::Reasoner, backends::TransportKind::Template}) {}

backends::ModelResponse TemplateReasoner::invoke(const backends::ModelRequest& request) {
    const auto& tag = request.schema_tag;
    const json& p = request.payload;
    try {
        if (tag == "plan" || tag == "replan") {
            const auto caps = capabilities_of(p.at("catalog"));
            const json attachments = value_or(p, "attachments", json::array());
            if (tag == "replan") return respond_json(template_replan(p.at("prior"), p.at("verdict"), caps));
            return respond_json(template_plan(p.at("query").get<std::string>(), !attachments.empty(), attachments, caps));
        }
        if (tag == "verify_plan" || tag == "verify_results") {
            return respond_json({{"decision", "approve"}, {"reasons", json::array()}, {"revision_hints", json::array()}});
        }
        if (tag == "select_tool") {
            const auto& first = p.at("candidates").at(0);
            return respond_json({{"tool_id", first.at("tool_id")}, {"rationale", "first registered match"}});
        }
        if (tag == "aggregate") return respond_text(p.at("anchor").get<std::string>());
        if (tag == "motion_aware_estimate") return respond_text(top_candidate(p.at("candidates")));
        if (tag == "motion_aware_refine") return respond_text(p.at("preliminary").get<std::string>());
        if (tag == "generate") {
            std::vector<std::string> parts;
            for (const auto& e : p.at("context")) {
                const auto payload = text::trim(e.at("payload").get<std::string>());
                if (!payload.empty()) parts.push_back(payload);
            }
            return respond_text(text::join(parts, "\n"));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedResponse, model_id() + ": unexpected " + tag + " payload: " + e.what());
    }
    throw Error(ErrorCode::PreconditionViolation, model_id() + " has no rule for schema '" + tag + "'");
}

} // namespace motionagent::agents
