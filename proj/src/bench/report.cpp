#include "motionagent/bench/report.hpp"

#include "motionagent/common/error.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

namespace motionagent::bench {

json to_json(const CaseResult& r) {
    json j{{"case_id", r.case_id},
           {"task_kind", to_string(r.kind)},
           {"category", r.category},
           {"prediction", r.prediction},
           {"correct", r.correct},
           {"score", r.score},
           {"failed", r.failed},
           {"rounds", r.rounds}};
    if (r.failed) j["failure"] = r.failure;
    if (r.predicted_count) j["predicted_count"] = *r.predicted_count;
    if (r.truth_count) j["truth_count"] = *r.truth_count;
    if (r.count_unparsed) j["count_unparsed"] = true;
    return j;
}

std::optional<double> ColumnStats::accuracy() const {
    if (cases == 0) return std::nullopt;
    return 100.0 * static_cast<double>(correct) / static_cast<double>(cases);
}

std::optional<double> ColumnStats::mean_score() const {
    if (cases == 0) return std::nullopt;
    return static_cast<double>(score_sum) / static_cast<double>(cases);
}

const ColumnStats* BenchReport::column(const std::string& label) const {
    for (const auto& c : columns) {
        if (c.label == label) return &c;
    }
    return nullptr;
}

namespace {

std::string label_for(BenchFormat f, const std::string& category) {
    return f == BenchFormat::MoVid ? category + "." : category;
}

std::string overall_label(BenchFormat f) {
    switch (f) {
        case BenchFormat::BabelQA: return "Overall";
        case BenchFormat::MVBench: return "Avg.";
        default: return "All";
    }
}

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

} // namespace

std::vector<std::string> column_labels(BenchFormat f) {
    std::vector<std::string> out;
    for (const auto& c : format_categories(f)) out.push_back(label_for(f, c));
    out.push_back(overall_label(f));
    return out;
}

BenchReport build_report(BenchFormat format, std::vector<CaseResult> results, json metadata) {
    std::sort(results.begin(), results.end(),
              [](const CaseResult& a, const CaseResult& b) { return a.case_id < b.case_id; });

    BenchReport report;
    report.format = format;
    report.metadata = std::move(metadata);
    for (const auto& label : column_labels(format)) report.columns.push_back({label, 0, 0, 0});

    std::map<std::string, size_t> index;
    const auto& cats = format_categories(format);
    for (size_t i = 0; i < cats.size(); ++i) index[cats[i]] = i;

    std::vector<long long> preds;
    std::vector<long long> truths;
    for (const auto& r : results) {
        auto tally = [&](ColumnStats& col) {
            ++col.cases;
            col.correct += r.correct;
            col.score_sum += r.score;
        };
        if (auto it = index.find(r.category); it != index.end()) {
            tally(report.columns[it->second]);
        } else if (!cats.empty()) {
            throw Error(ErrorCode::InvalidArgument, "case '" + r.case_id + "' has category '" + r.category +
                                                        "' outside the " + std::string(to_string(format)) + " layout");
        }
        tally(report.columns.back());
        report.failed_cases += r.failed;
        if (format == BenchFormat::RepCount) {
            preds.push_back(r.predicted_count.value_or(0));
            truths.push_back(r.truth_count.value_or(0));
        }
    }
    if (format == BenchFormat::RepCount && !truths.empty()) report.repcount = repcount_metrics(preds, truths);
    report.cases = std::move(results);
    return report;
}

json to_json(const BenchReport& r) {
    json labels = json::array();
    json results = json::object();
    for (const auto& c : r.columns) {
        labels.push_back(c.label);
        results[c.label] = {{"cases", c.cases},
                            {"correct", c.correct},
                            {"accuracy", nullable(c.accuracy())},
                            {"score", nullable(c.mean_score())}};
    }
    json j{{"format", to_string(r.format)},
           {"columns", labels},
           {"results", results},
           {"failed_cases", r.failed_cases},
           {"metadata", r.metadata},
           {"cases", json::array()}};
    for (const auto& c : r.cases) j["cases"].push_back(to_json(c));
    if (r.repcount) {
        j["repcount"] = {{"OBO", r.repcount->obo}, {"MAE", r.repcount->mae}, {"OBZ", r.repcount->obz},
                         {"RMSE", r.repcount->rmse}};
    }
    return j;
}

std::string serialize_report(const BenchReport& r) {
    return to_json(r).dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string pad(std::string s, size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

std::string row_label(const BenchReport& r) {
    if (auto it = r.metadata.find("label"); it != r.metadata.end() && it->is_string()) return it->get<std::string>();
    return "motionagent";
}

std::string rstrip_lines(const std::string& s) {
    std::string out;
    size_t start = 0;
    while (start < s.size()) {
        auto end = s.find('\n', start);
        if (end == std::string::npos) end = s.size();
        auto line = s.substr(start, end - start);
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + "\n";
        start = end + 1;
    }
    return out;
}

} // namespace

std::string render_table(const BenchReport& r) {
    const size_t first = std::max<size_t>(16, row_label(r).size() + 2);
    std::string h1, h2, row;

    switch (r.format) {
        case BenchFormat::MoVid: {
            h1 = pad("MoVid-Bench", first);
            h2 = pad("", first);
            row = pad(row_label(r), first);
            for (const auto& c : r.columns) {
                h1 += pad(c.label, 16);
                h2 += pad("Acc.", 8) + pad("Score", 8);
                row += pad(c.accuracy() ? fmt("%.2f", *c.accuracy()) : "-", 8) +
                       pad(c.mean_score() ? fmt("%.2f", *c.mean_score()) : "-", 8);
            }
            return rstrip_lines(h1 + "\n" + h2 + "\n" + row + "\n");
        }
        case BenchFormat::BabelQA: {
            h1 = pad("Model", first);
            row = pad(row_label(r), first);
            std::vector<const ColumnStats*> order{&r.overall()};
            for (size_t i = 0; i + 1 < r.columns.size(); ++i) order.push_back(&r.columns[i]);
            for (const auto* c : order) {
                const size_t w = std::max<size_t>(10, c->label.size() + 2);
                h1 += pad(c->label, w);
                row += pad(c->accuracy() ? fmt("%.3f", *c->accuracy() / 100.0) : "-", w);
            }
            return rstrip_lines(h1 + "\n" + row + "\n");
        }
        case BenchFormat::MVBench: {
            h1 = pad("Model", first);
            row = pad(row_label(r), first);
            for (const auto& c : r.columns) {
                h1 += pad(c.label, 8);
                row += pad(c.accuracy() ? fmt("%.1f", *c.accuracy()) : "-", 8);
            }
            return rstrip_lines(h1 + "\n" + row + "\n");
        }
        case BenchFormat::RepCount: {
            h1 = pad("Model", first) + pad("OBO", 8) + pad("MAE", 8) + pad("OBZ", 8) + pad("RMSE", 8);
            row = pad(row_label(r), first);
            if (r.repcount) {
                row += pad(fmt("%.3f", r.repcount->obo), 8) + pad(fmt("%.3f", r.repcount->mae), 8) +
                       pad(fmt("%.3f", r.repcount->obz), 8) + pad(fmt("%.2f", r.repcount->rmse), 8);
            } else {
                row += pad("-", 8) + pad("-", 8) + pad("-", 8) + pad("-", 8);
            }
            return rstrip_lines(h1 + "\n" + row + "\n");
        }
    }
    return {};
}

} // namespace motionagent::bench
