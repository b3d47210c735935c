#include "motionagent/motioncore/aggregation.hpp"

#include "motionagent/common/error.hpp"
#include "motionagent/common/text.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <regex>
#include <set>

namespace motionagent::motioncore {

namespace {

constexpr double kRelativeEpsilon = 1e-9;

bool nearly_equal(double a, double b) {
    return std::fabs(a - b) <= kRelativeEpsilon * std::max({1e-300, std::fabs(a), std::fabs(b)});
}

struct UnionFind {
    std::vector<size_t> parent;
    explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    size_t find(size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(size_t a, size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

template <typename Edge>
std::vector<Cluster> partition(size_t n, Edge edge) {
    UnionFind uf(n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            if (edge(i, j)) uf.unite(i, j);
        }
    }
    std::vector<Cluster> clusters;
    std::vector<long> slot(n, -1);
    for (size_t i = 0; i < n; ++i) {
        const size_t root = uf.find(i);
        if (slot[root] < 0) {
            slot[root] = static_cast<long>(clusters.size());
            clusters.emplace_back();
        }
        clusters[static_cast<size_t>(slot[root])].push_back(i);
    }
    return clusters;
}

struct Prepared {
    std::vector<std::string> norm;
    std::vector<std::set<std::string>> tokens;
};

Prepared prepare(const std::vector<ScoredResult>& results) {
    Prepared p;
    for (const auto& r : results) {
        p.norm.push_back(text::normalize(r.text));
        p.tokens.push_back(text::token_set(r.text));
    }
    return p;
}

bool overlaps(const Prepared& p, size_t i, size_t j, double threshold) {
    if (p.norm[i] == p.norm[j]) return true;
    if (p.tokens[i].empty() || p.tokens[j].empty()) return false;
    return text::jaccard(p.tokens[i], p.tokens[j]) >= threshold;
}

struct Scored {
    Cluster members;
    double mass = 0;
    size_t candidate = 0;
};

// Lower is better: higher value first, then lexicographic text.
bool text_before(const std::vector<ScoredResult>& results, const Prepared& p, size_t a, size_t b) {
    if (p.norm[a] != p.norm[b]) return p.norm[a] < p.norm[b];
    if (results[a].text != results[b].text) return results[a].text < results[b].text;
    return results[a].model_id < results[b].model_id;
}

Scored score_cluster(const std::vector<ScoredResult>& results, const Prepared& p, const Cluster& c) {
    Scored s;
    s.members = c;
    std::vector<double> confs;
    for (size_t i : c) confs.push_back(results[i].confidence);
    std::sort(confs.begin(), confs.end());
    s.mass = std::accumulate(confs.begin(), confs.end(), 0.0);

    const double top = confs.back();
    bool have = false;
    for (size_t i : c) {
        if (!nearly_equal(results[i].confidence, top) && results[i].confidence < top) continue;
        if (!have || text_before(results, p, i, s.candidate)) {
            s.candidate = i;
            have = true;
        }
    }
    return s;
}

std::vector<std::string> model_ids(const std::vector<ScoredResult>& results, const Cluster& c) {
    std::vector<std::string> ids;
    for (size_t i : c) ids.push_back(results[i].model_id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

struct Deterministic {
    std::vector<Scored> clusters;
    size_t winner = 0;
};

Deterministic deterministic_winner(const std::vector<ScoredResult>& results, const Prepared& p) {
    Deterministic d;
    for (const auto& c : default_clusters(results)) d.clusters.push_back(score_cluster(results, p, c));

    double best_mass = d.clusters.front().mass;
    for (const auto& s : d.clusters) best_mass = std::max(best_mass, s.mass);
    std::vector<size_t> tied;
    for (size_t k = 0; k < d.clusters.size(); ++k) {
        if (d.clusters[k].mass >= best_mass || nearly_equal(d.clusters[k].mass, best_mass)) tied.push_back(k);
    }
    double best_conf = 0;
    for (size_t k : tied) best_conf = std::max(best_conf, results[d.clusters[k].candidate].confidence);
    bool have = false;
    for (size_t k : tied) {
        const double conf = results[d.clusters[k].candidate].confidence;
        if (conf < best_conf && !nearly_equal(conf, best_conf)) continue;
        if (!have || text_before(results, p, d.clusters[k].candidate, d.clusters[d.winner].candidate)) {
            d.winner = k;
            have = true;
        }
    }
    return d;
}

json candidates_json(const std::vector<ScoredResult>& results) {
    std::vector<ScoredResult> sorted = results;
    std::sort(sorted.begin(), sorted.end(), [](const ScoredResult& a, const ScoredResult& b) {
        return std::tie(a.model_id, a.text, a.confidence) < std::tie(b.model_id, b.text, b.confidence);
    });
    return sorted;
}

std::string reply_text(const backends::ModelResponse& r) {
    if (auto it = r.fields.find("answer"); it != r.fields.end() && it->is_string()) return it->get<std::string>();
    return text::trim(r.text);
}

} // namespace

std::vector<Cluster> cluster_results(const std::vector<ScoredResult>& results, ClusterSpec spec) {
    const Prepared p = prepare(results);
    if (spec.mode == ClusterMode::ExactMatch) {
        return partition(results.size(), [&](size_t i, size_t j) { return p.norm[i] == p.norm[j]; });
    }
    return partition(results.size(), [&](size_t i, size_t j) { return overlaps(p, i, j, spec.threshold); });
}

bool is_option_answer(const std::string& answer) {
    static const std::regex option(R"(^(option\s+)?\(?[a-z]\)?[.:)]?$)");
    return std::regex_match(text::normalize(answer), option);
}

std::vector<Cluster> default_clusters(const std::vector<ScoredResult>& results) {
    const Prepared p = prepare(results);
    std::vector<bool> option(results.size());
    for (size_t i = 0; i < results.size(); ++i) option[i] = is_option_answer(results[i].text);
    return partition(results.size(), [&](size_t i, size_t j) {
        if (p.norm[i] == p.norm[j]) return true;
        if (option[i] || option[j]) return false;
        return overlaps(p, i, j, 0.5);
    });
}

AggregatedResult aggregate_confidence(const std::vector<ScoredResult>& results, const backends::BackendHandle& reasoner,
                                      const PromptSet& prompts) {
    if (results.empty()) throw Error(ErrorCode::EmptyInput, "nothing to aggregate");
    const Prepared p = prepare(results);
    const Deterministic d = deterministic_winner(results, p);
    const Scored& win = d.clusters[d.winner];

    AggregatedResult out;
    out.method = AggregationMethod::ConfidenceMechanism;
    out.final_text = results[win.candidate].text;
    out.winning_cluster = model_ids(results, win.members);
    out.support_mass = win.mass;
    if (!reasoner) return out;

    StageRecord stage{"integrate", reasoner->model_id(), {{"candidates", candidates_json(results)}, {"anchor", out.final_text}}, {}, {}};
    try {
        const auto reply = reasoner->invoke({prompts.get("aggregate"), stage.input, "aggregate"});
        const std::string chosen = reply_text(reply);
        stage.output = chosen;
        const std::string norm = text::normalize(chosen);
        const Scored* hit = nullptr;
        size_t member = 0;
        for (const auto& s : d.clusters) {
            for (size_t i : s.members) {
                if (p.norm[i] != norm) continue;
                if (!hit || results[i].confidence > results[member].confidence ||
                    (results[i].confidence == results[member].confidence && text_before(results, p, i, member))) {
                    hit = &s;
                    member = i;
                }
            }
        }
        if (hit) {
            out.final_text = results[member].text;
            out.winning_cluster = model_ids(results, hit->members);
            out.support_mass = hit->mass;
        } else {
            stage.error = "reply is not one of the candidate answers";
            out.degraded = true;
        }
    } catch (const Error& e) {
        stage.error = e.what();
        out.degraded = true;
    }
    out.stages.push_back(std::move(stage));
    return out;
}

bool accepts_modality(backends::BackendKind kind, Modality modality) {
    switch (kind) {
    case backends::BackendKind::MotionSpecialist: return modality != Modality::Video;
    case backends::BackendKind::VideoSpecialist: return modality != Modality::Motion;
    default: return false;
    }
}

AggregatedResult aggregate_motion_aware(const std::vector<ScoredResult>& results, const MediaRef& media,
                                        const backends::BackendHandle& specialist,
                                        const backends::BackendHandle& reasoner, const PromptSet& prompts) {
    if (results.empty()) throw Error(ErrorCode::EmptyInput, "nothing to aggregate");
    if (!specialist || !reasoner) throw Error(ErrorCode::PreconditionViolation, "motion-aware aggregation needs a specialist and a reasoner");
    if (media.empty() || !accepts_modality(specialist->kind(), media.modality())) {
        throw Error(ErrorCode::PreconditionViolation,
                    specialist->model_id() + " cannot read " + std::string(to_string(media.modality())) + " media");
    }

    AggregatedResult out;
    out.method = AggregationMethod::MotionAware;
    const json candidates = candidates_json(results);

    StageRecord estimate{"estimate", specialist->model_id(), {{"candidates", candidates}, {"media", media}}, {}, {}};
    std::string preliminary;
    try {
        preliminary = reply_text(specialist->invoke({prompts.get("motion_aware_estimate"), estimate.input, "motion_aware_estimate"}));
    } catch (const Error& e) {
        throw Error(ErrorCode::SpecialistFailure, "stage 1 (" + specialist->model_id() + "): " + e.what(),
                    {{"stage", "estimate"}, {"cause", e.to_json()}});
    }
    if (preliminary.empty()) {
        throw Error(ErrorCode::SpecialistFailure, "stage 1 (" + specialist->model_id() + "): empty estimate",
                    {{"stage", "estimate"}});
    }
    estimate.output = preliminary;
    out.preliminary = preliminary;
    out.stages.push_back(std::move(estimate));

    StageRecord refine{"refine", reasoner->model_id(), {{"candidates", candidates}, {"preliminary", preliminary}}, {}, {}};
    try {
        std::string final_text = reply_text(reasoner->invoke({prompts.get("motion_aware_refine"), refine.input, "motion_aware_refine"}));
        if (final_text.empty()) throw Error(ErrorCode::ReasonerFailure, "empty refinement");
        refine.output = final_text;
        out.final_text = std::move(final_text);
    } catch (const Error& e) {
        refine.error = e.what();
        out.final_text = preliminary;
        out.degraded = true;
    }
    out.stages.push_back(std::move(refine));

    const Prepared p = prepare(results);
    const std::string norm = text::normalize(out.final_text);
    for (const auto& c : default_clusters(results)) {
        const bool member = std::any_of(c.begin(), c.end(), [&](size_t i) { return p.norm[i] == norm; });
        if (member) {
            const Scored s = score_cluster(results, p, c);
            out.winning_cluster = model_ids(results, c);
            out.support_mass = s.mass;
            break;
        }
    }
    return out;
}

} // namespace motionagent::motioncore
