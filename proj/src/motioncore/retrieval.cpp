#include "motionagent/motioncore/retrieval.hpp"

#include "motionagent/common/error.hpp"
#include "motionagent/common/json_util.hpp"
#include "motionagent/common/text.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace motionagent::motioncore {

namespace {

double norm(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

std::string line_error(const std::filesystem::path& path, size_t line, const std::string& msg) {
    return path.string() + ":" + std::to_string(line) + ": " + msg;
}

} // namespace

void MotionStore::add(MotionStoreItem item) {
    if (item.embedding.empty() || norm(item.embedding) == 0.0) {
        throw Error(ErrorCode::InvalidArgument, "item " + item.item_id + " has a zero embedding");
    }
    if (!items_.empty() && item.embedding.size() != dim_) {
        throw Error(ErrorCode::DimensionMismatch, "item " + item.item_id + " has dimension " +
                                                      std::to_string(item.embedding.size()) + ", store has " +
                                                      std::to_string(dim_));
    }
    for (const auto& existing : items_) {
        if (existing.item_id == item.item_id) throw Error(ErrorCode::InvalidArgument, "duplicate item id " + item.item_id);
    }
    dim_ = item.embedding.size();
    items_.push_back(std::move(item));
}

MotionStore MotionStore::load(const std::filesystem::path& dir) {
    const auto path = std::filesystem::is_directory(dir) ? dir / "items.jsonl" : dir;
    if (!std::filesystem::exists(path)) throw Error(ErrorCode::ConfigInvalid, "motion store " + path.string() + " not found");
    MotionStore store;
    for_each_jsonl(
        path,
        [&](size_t line, const json& j) {
            try {
                MotionStoreItem item;
                item.item_id = j.at("id").get<std::string>();
                item.label = j.at("label").get<std::string>();
                item.embedding = j.at("embedding").get<std::vector<double>>();
                if (auto it = j.find("media"); it != j.end()) item.media = it->get<MediaRef>();
                store.add(std::move(item));
            } catch (const json::exception& e) {
                throw Error(ErrorCode::ConfigInvalid, line_error(path, line, e.what()));
            } catch (const Error& e) {
                throw Error(ErrorCode::ConfigInvalid, line_error(path, line, e.message()));
            }
        },
        [&](size_t line, const std::string& msg) { throw Error(ErrorCode::ConfigInvalid, line_error(path, line, msg)); });
    return store;
}

std::vector<RetrievalHit> retrieve_motion(const std::vector<double>& query_embedding, const MotionStore& store, size_t k) {
    if (store.empty()) throw Error(ErrorCode::EmptyStore, "motion store is empty");
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
    if (query_embedding.size() != store.dimension()) {
        throw Error(ErrorCode::DimensionMismatch, "query has dimension " + std::to_string(query_embedding.size()) +
                                                      ", store has " + std::to_string(store.dimension()));
    }
    const double qn = norm(query_embedding);
    if (qn == 0.0) throw Error(ErrorCode::InvalidArgument, "query embedding is zero");

    std::vector<RetrievalHit> hits;
    for (const auto& item : store.items()) {
        double dot = 0;
        for (size_t i = 0; i < query_embedding.size(); ++i) dot += query_embedding[i] * item.embedding[i];
        hits.push_back({item, dot / (qn * norm(item.embedding))});
    }
    std::sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.item.item_id < b.item.item_id;
    });
    hits.resize(std::min(k, hits.size()));
    return hits;
}

KnowledgeBase KnowledgeBase::load(const std::filesystem::path& path) {
    const auto file = std::filesystem::is_directory(path) ? path / "passages.jsonl" : path;
    if (!std::filesystem::exists(file)) throw Error(ErrorCode::ConfigInvalid, "knowledge base " + file.string() + " not found");
    std::vector<Passage> passages;
    for_each_jsonl(
        file,
        [&](size_t line, const json& j) {
            try {
                passages.push_back({j.at("id").get<std::string>(), value_or(j, "title", std::string{}),
                                    j.at("text").get<std::string>()});
            } catch (const json::exception& e) {
                throw Error(ErrorCode::ConfigInvalid, line_error(file, line, e.what()));
            }
        },
        [&](size_t line, const std::string& msg) { throw Error(ErrorCode::ConfigInvalid, line_error(file, line, msg)); });
    return KnowledgeBase(std::move(passages));
}

std::vector<PassageHit> lookup_knowledge(const std::string& question, const KnowledgeBase& kb, size_t k) {
    if (kb.empty()) throw Error(ErrorCode::EmptyKnowledgeBase, "knowledge base has no passages");
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
    const auto query_tokens = text::token_set(question);
    std::vector<PassageHit> hits;
    for (const auto& p : kb.passages()) {
        const auto tokens = text::token_set(p.title + " " + p.text);
        size_t score = 0;
        for (const auto& t : query_tokens) score += tokens.count(t);
        hits.push_back({p, score});
    }
    std::sort(hits.begin(), hits.end(), [](const PassageHit& a, const PassageHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.passage.id < b.passage.id;
    });
    hits.resize(std::min(k, hits.size()));
    return hits;
}

} // namespace motionagent::motioncore
