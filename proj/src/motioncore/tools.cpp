#include "motionagent/motioncore/tools.hpp"

#include "motionagent/backends/hash_embedder.hpp"
#include "motionagent/common/error.hpp"
#include "motionagent/motioncore/aggregation.hpp"
#include "motionagent/motioncore/analyzer.hpp"
#include "motionagent/motioncore/generator.hpp"

#include <algorithm>
#include <cstdio>

namespace motionagent::motioncore {

namespace {

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::optional<MediaRef> first_media(const ToolInvocation& inv) {
    auto media = inv.media();
    if (!media.empty()) return media.front();
    for (const auto* up : inv.upstream()) {
        if (auto it = up->output.data.find("media"); it != up->output.data.end() && it->is_object()) {
            return it->get<MediaRef>();
        }
    }
    if (!inv.query.attachments.empty()) return inv.query.attachments.front();
    return std::nullopt;
}

ToolOutput run_analysis(const ToolInvocation& inv, const MotionCoreSettings& s, const std::string& task) {
    const auto media = first_media(inv);
    if (!media || media->empty()) throw Error(ErrorCode::ToolFailure, "no media attached to analyze");
    const Modality modality = media->modality();
    std::vector<backends::BackendHandle> eligible;
    for (const auto& m : s.analyzers) {
        if (accepts_modality(m->kind(), modality)) eligible.push_back(m);
    }
    if (eligible.empty()) {
        throw Error(ErrorCode::ToolFailure, "no analyzer accepts " + std::string(to_string(modality)) + " input");
    }
    const AnalysisRequest request{*media, modality, inv.question()};
    const auto results = analyze(request, eligible, s.confidence, s.deadline, std::min(s.quorum, eligible.size()),
                                 s.clock, s.prompts, task);
    std::string payload;
    for (const auto& r : results) payload += r.model_id + ": " + r.text + "\n";
    if (!payload.empty()) payload.pop_back();
    return {payload, {{"candidates", results}, {"media", *media}, {"question", request.question}, {"task", task}}};
}

ToolOutput run_aggregate(const ToolInvocation& inv, const MotionCoreSettings& s) {
    std::vector<ScoredResult> candidates;
    for (const auto* up : inv.upstream()) {
        if (auto it = up->output.data.find("candidates"); it != up->output.data.end()) {
            for (const auto& c : *it) candidates.push_back(c.get<ScoredResult>());
        }
    }
    if (candidates.empty()) throw Error(ErrorCode::EmptyInput, "no analysis candidates to aggregate");
    AggregatedResult result;
    if (s.aggregation == AggregationMethod::MotionAware) {
        const auto media = first_media(inv);
        if (!media) throw Error(ErrorCode::PreconditionViolation, "motion-aware aggregation needs the raw media");
        result = aggregate_motion_aware(candidates, *media, s.specialist, s.aggregator, s.prompts);
    } else {
        result = aggregate_confidence(candidates, s.aggregator, s.prompts);
    }
    json data = to_json(result);
    if (const auto media = first_media(inv)) data["media"] = *media;
    return {result.final_text, std::move(data)};
}

ToolOutput run_generate(const ToolInvocation& inv, const MotionCoreSettings& s) {
    GenerationContext ctx;
    ctx.query = inv.query;
    for (const auto* up : inv.upstream()) ctx.entries.push_back({up->source_task, up->source_tool, up->output.payload});
    const auto answer = generate_answer(ctx, s.generator, s.prompts);
    return {answer.text, answer};
}

ToolOutput run_retrieve(const ToolInvocation& inv, const MotionCoreSettings& s) {
    if (!s.store || !s.embedder) throw Error(ErrorCode::PreconditionViolation, "motion retrieval is not configured");
    const auto hits = retrieve_motion(backends::embed_text(*s.embedder, inv.question()), *s.store, s.retrieve_k);
    std::string payload;
    json data = json::array();
    for (const auto& h : hits) {
        payload += h.item.label + " (" + h.item.item_id + ", similarity " + fixed3(h.similarity) + ")\n";
        data.push_back({{"id", h.item.item_id}, {"label", h.item.label}, {"similarity", h.similarity}, {"media", h.item.media}});
    }
    if (!payload.empty()) payload.pop_back();
    return {payload, {{"matches", std::move(data)}}};
}

ToolOutput run_lookup(const ToolInvocation& inv, const MotionCoreSettings& s) {
    if (!s.knowledge) throw Error(ErrorCode::EmptyKnowledgeBase, "no knowledge base configured");
    const auto hits = lookup_knowledge(inv.question(), *s.knowledge, s.knowledge_k);
    std::string payload;
    json data = json::array();
    for (const auto& h : hits) {
        payload += h.passage.title + ": " + h.passage.text + "\n";
        data.push_back({{"id", h.passage.id}, {"title", h.passage.title}, {"score", h.score}});
    }
    if (!payload.empty()) payload.pop_back();
    return {payload, {{"passages", std::move(data)}}};
}

} // namespace

const std::vector<std::string>& builtin_tool_names() {
    static const std::vector<std::string> names = {"analyze_motion",  "count_repetitions", "aggregate",
                                                   "generate_answer", "retrieve_motion",   "lookup_knowledge"};
    return names;
}

ToolDescriptor builtin_descriptor(const std::string& name) {
    if (name == "analyze_motion") {
        return {"motion_analyzer", {name}, "Runs every motion and video model on the attached media and collects their answers with confidences.",
                {{"media", "media"}, {"question", "text"}}, CostHint::MultiModelCall};
    }
    if (name == "count_repetitions") {
        return {"repetition_counter", {name}, "Asks the analysis models how many repetitions of an action the media shows.",
                {{"media", "media"}, {"question", "text"}}, CostHint::MultiModelCall};
    }
    if (name == "aggregate") {
        return {"aggregator", {name}, "Merges candidate analyses from several models into one result.",
                {{"candidates", "analysis"}}, CostHint::ModelCall};
    }
    if (name == "generate_answer") {
        return {"answer_generator", {name}, "Writes the final answer to the user from the collected context.",
                {{"context", "context"}}, CostHint::ModelCall};
    }
    if (name == "retrieve_motion") {
        return {"motion_retriever", {name}, "Finds stored motions similar to a text description.",
                {{"question", "text"}}, CostHint::Cheap};
    }
    if (name == "lookup_knowledge") {
        return {"knowledge_lookup", {name}, "Looks up passages about exercise, anatomy and technique.",
                {{"question", "text"}}, CostHint::Cheap};
    }
    throw Error(ErrorCode::UnknownTool, "no builtin tool '" + name + "'");
}

ToolHandler builtin_handler(const std::string& name, std::shared_ptr<const MotionCoreSettings> settings) {
    if (!settings) throw Error(ErrorCode::InvalidArgument, "builtin tools need settings");
    if (name == "analyze_motion") return [settings](const ToolInvocation& inv) { return run_analysis(inv, *settings, "describe"); };
    if (name == "count_repetitions") return [settings](const ToolInvocation& inv) { return run_analysis(inv, *settings, "count"); };
    if (name == "aggregate") return [settings](const ToolInvocation& inv) { return run_aggregate(inv, *settings); };
    if (name == "generate_answer") return [settings](const ToolInvocation& inv) { return run_generate(inv, *settings); };
    if (name == "retrieve_motion") return [settings](const ToolInvocation& inv) { return run_retrieve(inv, *settings); };
    if (name == "lookup_knowledge") return [settings](const ToolInvocation& inv) { return run_lookup(inv, *settings); };
    throw Error(ErrorCode::UnknownTool, "no builtin tool '" + name + "'");
}

bool builtin_available(const std::string& name, const MotionCoreSettings& s) {
    if (name == "analyze_motion" || name == "count_repetitions") return !s.analyzers.empty();
    if (name == "aggregate") {
        return s.aggregation == AggregationMethod::ConfidenceMechanism || (s.specialist && s.aggregator);
    }
    if (name == "generate_answer") return s.generator != nullptr;
    if (name == "retrieve_motion") return s.store && s.embedder;
    if (name == "lookup_knowledge") return s.knowledge != nullptr;
    return false;
}

void register_builtin_tools(ToolRegistry& registry, std::shared_ptr<const MotionCoreSettings> settings) {
    for (const auto& name : builtin_tool_names()) {
        if (builtin_available(name, *settings)) registry.register_tool(builtin_descriptor(name), builtin_handler(name, settings));
    }
}

ToolHandler backend_tool_handler(const std::string& tool_id, backends::BackendHandle backend, PromptSet prompts) {
    if (!backend) throw Error(ErrorCode::InvalidArgument, "tool " + tool_id + " has no backend");
    return [tool_id, backend, prompts](const ToolInvocation& inv) {
        json upstream = json::array();
        for (const auto* up : inv.upstream()) upstream.push_back({{"task_id", up->source_task}, {"payload", up->output.payload}});
        const json payload = {{"question", inv.question()}, {"media", inv.media()}, {"inputs", std::move(upstream)}};
        const std::string tag = "tool:" + tool_id;
        const auto reply = backend->invoke({prompts.get(tag), payload, tag});
        return ToolOutput{reply.text, reply.fields};
    };
}

} // namespace motionagent::motioncore
