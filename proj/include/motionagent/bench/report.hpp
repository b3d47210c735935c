#pragma once

#include "motionagent/bench/dataset.hpp"
#include "motionagent/bench/metrics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace motionagent::bench {

/// Outcome of one case. `failed` marks cases whose turn or judging did not
/// complete; they count as incorrect with score 0.
struct CaseResult {
    std::string case_id;
    TaskKind kind = TaskKind::FreeQA;
    std::string category;
    std::string prediction;
    bool correct = false;
    int score = 0;
    bool failed = false;
    std::string failure;
    int rounds = 0;
    std::optional<long long> predicted_count;
    std::optional<long long> truth_count;
    bool count_unparsed = false;
};

json to_json(const CaseResult& r);

struct ColumnStats {
    std::string label;
    size_t cases = 0;
    size_t correct = 0;
    long long score_sum = 0;

    /// Percent in [0, 100]; nullopt without cases.
    std::optional<double> accuracy() const;
    /// Mean score in [0, 5]; nullopt without cases.
    std::optional<double> mean_score() const;
};

struct BenchReport {
    BenchFormat format = BenchFormat::MoVid;
    /// Category columns in layout order, followed by the overall column.
    std::vector<ColumnStats> columns;
    std::optional<RepCountMetrics> repcount;
    size_t failed_cases = 0;
    json metadata = json::object();
    /// Sorted by case_id.
    std::vector<CaseResult> cases;

    const ColumnStats& overall() const { return columns.back(); }
    const ColumnStats* column(const std::string& label) const;
};

/// Column labels for a format: "Body.", "Seq.", "Dir.", "Rea.", "Hall.",
/// "All" for MoVid; "Action" .. "Other", "Overall" for BABEL-QA; the seven
/// MVBench sub-tasks and "Avg."; "All" alone for RepCount.
std::vector<std::string> column_labels(BenchFormat f);

/// Pure function of the multiset of results: input order does not matter.
BenchReport build_report(BenchFormat format, std::vector<CaseResult> results, json metadata);

json to_json(const BenchReport& r);
/// Pretty JSON with a trailing newline; the golden-file format.
std::string serialize_report(const BenchReport& r);
/// Plain-text table in the layout of the published result tables.
std::string render_table(const BenchReport& r);

} // namespace motionagent::bench
