#pragma once

#include "motionagent/common/media.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace motionagent::motioncore {

struct MotionStoreItem {
    std::string item_id;
    std::string label;
    std::vector<double> embedding;
    MediaRef media;
};

class MotionStore {
public:
    /// Throws DimensionMismatch when the embedding width differs from the
    /// store's, InvalidArgument for a zero vector or duplicate id.
    void add(MotionStoreItem item);

    /// Reads `<dir>/items.jsonl` with {id, label, media, embedding} records.
    static MotionStore load(const std::filesystem::path& dir);

    const std::vector<MotionStoreItem>& items() const noexcept { return items_; }
    size_t dimension() const noexcept { return dim_; }
    bool empty() const noexcept { return items_.empty(); }

private:
    std::vector<MotionStoreItem> items_;
    size_t dim_ = 0;
};

struct RetrievalHit {
    MotionStoreItem item;
    double similarity = 0.0;
};

/// Top min(k, |store|) items by cosine similarity, ties by id ascending.
///
/// Throws EmptyStore, DimensionMismatch, InvalidArgument (k = 0 or zero query).
std::vector<RetrievalHit> retrieve_motion(const std::vector<double>& query_embedding, const MotionStore& store, size_t k);

struct Passage {
    std::string id;
    std::string title;
    std::string text;
};

class KnowledgeBase {
public:
    KnowledgeBase() = default;
    explicit KnowledgeBase(std::vector<Passage> passages) : passages_(std::move(passages)) {}

    /// Reads `<dir>/passages.jsonl` (or the file itself) with {id, title, text}.
    static KnowledgeBase load(const std::filesystem::path& path);

    const std::vector<Passage>& passages() const noexcept { return passages_; }
    bool empty() const noexcept { return passages_.empty(); }

private:
    std::vector<Passage> passages_;
};

struct PassageHit {
    Passage passage;
    /// Number of distinct question tokens found in the title or text.
    size_t score = 0;
};

/// Top-k passages by token overlap, ties by id ascending.
///
/// Throws EmptyKnowledgeBase, InvalidArgument (k = 0).
std::vector<PassageHit> lookup_knowledge(const std::string& question, const KnowledgeBase& kb, size_t k);

} // namespace motionagent::motioncore
