#include "motionagent/bench/dataset.hpp"

#include "motionagent/common/error.hpp"
#include "motionagent/common/text.hpp"

#include <set>

namespace motionagent::bench {

std::string_view to_string(TaskKind k) noexcept {
    switch (k) {
        case TaskKind::FreeQA: return "free_qa";
        case TaskKind::MultipleChoice: return "multiple_choice";
        case TaskKind::RepCount: return "rep_count";
    }
    return "free_qa";
}

std::string_view to_string(BenchFormat f) noexcept {
    switch (f) {
        case BenchFormat::MoVid: return "movid";
        case BenchFormat::BabelQA: return "babelqa";
        case BenchFormat::MVBench: return "mvbench";
        case BenchFormat::RepCount: return "repcount";
    }
    return "movid";
}

BenchFormat bench_format_from_string(std::string_view tag) {
    const auto t = text::to_lower(text::trim(tag));
    if (t == "movid") return BenchFormat::MoVid;
    if (t == "babelqa" || t == "babel-qa") return BenchFormat::BabelQA;
    if (t == "mvbench") return BenchFormat::MVBench;
    if (t == "repcount" || t == "mo-repcount") return BenchFormat::RepCount;
    throw Error(ErrorCode::UnknownFormat, "unknown dataset format '" + std::string(tag) + "'",
                {{"known", {"movid", "babelqa", "mvbench", "repcount"}}});
}

TaskKind task_kind_of(BenchFormat f) noexcept {
    switch (f) {
        case BenchFormat::MVBench: return TaskKind::MultipleChoice;
        case BenchFormat::RepCount: return TaskKind::RepCount;
        default: return TaskKind::FreeQA;
    }
}

const std::vector<std::string>& format_categories(BenchFormat f) {
    static const std::vector<std::string> movid = {"Body", "Seq", "Dir", "Rea", "Hall"};
    static const std::vector<std::string> babel = {"Action", "Direction", "Body Part", "Before", "After", "Other"};
    static const std::vector<std::string> mvbench = {"AL", "AP", "AS", "EN", "FA", "FP", "UA"};
    static const std::vector<std::string> none;
    switch (f) {
        case BenchFormat::MoVid: return movid;
        case BenchFormat::BabelQA: return babel;
        case BenchFormat::MVBench: return mvbench;
        case BenchFormat::RepCount: return none;
    }
    return none;
}

void BenchCase::validate() const {
    auto fail = [&](const std::string& msg) { throw Error(ErrorCode::ValidationError, msg, {{"case_id", case_id}}); };
    if (case_id.empty()) fail("case_id is empty");
    if (text::trim(question).empty()) fail("question is empty");
    if (media.id.empty() || media.empty()) fail("media reference is incomplete");
    switch (kind) {
        case TaskKind::FreeQA:
            if (text::trim(ground_truth).empty()) fail("ground_truth is empty");
            break;
        case TaskKind::MultipleChoice: {
            if (options.size() < 2) fail("multiple choice needs at least 2 options");
            std::set<std::string> ids;
            for (const auto& o : options) {
                if (o.id.empty() || text::trim(o.text).empty()) fail("option with empty id or text");
                if (!ids.insert(text::to_lower(o.id)).second) fail("duplicate option id '" + o.id + "'");
            }
            if (!ids.count(text::to_lower(ground_truth))) fail("ground_truth '" + ground_truth + "' is not an option id");
            break;
        }
        case TaskKind::RepCount:
            if (!truth_count) fail("ground_truth count is missing");
            if (*truth_count < 0) fail("ground_truth count is negative");
            break;
    }
}

void to_json(json& j, const BenchCase& c) {
    j = json{{"case_id", c.case_id},
             {"task_kind", to_string(c.kind)},
             {"category", c.category},
             {"media", c.media},
             {"question", c.question},
             {"ground_truth", c.ground_truth}};
    if (c.truth_count) j["ground_truth"] = *c.truth_count;
    if (!c.options.empty()) {
        j["options"] = json::array();
        for (const auto& o : c.options) j["options"].push_back({{"id", o.id}, {"text", o.text}});
    }
}

namespace {

std::string required_string(const json& rec, const char* key) {
    auto it = rec.find(key);
    if (it == rec.end() || it->is_null()) throw Error(ErrorCode::ValidationError, std::string("missing field '") + key + "'");
    if (!it->is_string()) throw Error(ErrorCode::ValidationError, std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

std::string canonical_category(const std::string& raw, BenchFormat format) {
    const auto& known = format_categories(format);
    if (known.empty()) return raw;
    const auto want = text::normalize(raw);
    for (const auto& k : known) {
        if (text::normalize(k) == want) return k;
    }
    throw Error(ErrorCode::ValidationError,
                "category '" + raw + "' is not one of " + text::join(known, ", "));
}

std::vector<ChoiceOption> parse_options(const json& j) {
    if (!j.is_array()) throw Error(ErrorCode::ValidationError, "options must be a list");
    std::vector<ChoiceOption> out;
    for (size_t i = 0; i < j.size(); ++i) {
        const auto& o = j[i];
        if (o.is_string()) {
            if (i >= 26) throw Error(ErrorCode::ValidationError, "too many unlabeled options");
            out.push_back({std::string(1, static_cast<char>('A' + i)), o.get<std::string>()});
        } else if (o.is_object() && o.contains("id") && o.contains("text") && o["id"].is_string() &&
                   o["text"].is_string()) {
            out.push_back({o["id"].get<std::string>(), o["text"].get<std::string>()});
        } else {
            throw Error(ErrorCode::ValidationError, "option " + std::to_string(i) + " must be a string or {id, text}");
        }
    }
    return out;
}

BenchCase parse_record(const json& rec, BenchFormat format) {
    if (!rec.is_object()) throw Error(ErrorCode::ValidationError, "record is not an object");
    BenchCase c;
    c.kind = task_kind_of(format);
    c.case_id = required_string(rec, "case_id");
    c.question = required_string(rec, "question");

    auto cat = rec.find("category");
    if (cat != rec.end() && !cat->is_null()) {
        if (!cat->is_string()) throw Error(ErrorCode::ValidationError, "field 'category' must be a string");
        c.category = canonical_category(cat->get<std::string>(), format);
    } else if (!format_categories(format).empty()) {
        throw Error(ErrorCode::ValidationError, "missing field 'category'");
    }

    auto media = rec.find("media");
    if (media == rec.end() || !media->is_object()) throw Error(ErrorCode::ValidationError, "missing field 'media'");
    try {
        c.media = media->get<MediaRef>();
    } catch (const Error& e) {
        throw Error(ErrorCode::ValidationError, "media: " + e.message());
    } catch (const json::exception&) {
        throw Error(ErrorCode::ValidationError, "media: malformed reference");
    }

    auto gt = rec.find("ground_truth");
    if (gt == rec.end() || gt->is_null()) throw Error(ErrorCode::ValidationError, "missing field 'ground_truth'");
    if (c.kind == TaskKind::RepCount) {
        long long n = -1;
        if (gt->is_number_integer()) {
            n = gt->get<long long>();
        } else if (gt->is_string() && !gt->get<std::string>().empty() &&
                   gt->get<std::string>().find_first_not_of("0123456789") == std::string::npos) {
            n = std::stoll(gt->get<std::string>());
        } else {
            throw Error(ErrorCode::ValidationError, "ground_truth must be a non-negative integer count");
        }
        c.truth_count = n;
        c.ground_truth = std::to_string(n);
    } else {
        if (!gt->is_string()) throw Error(ErrorCode::ValidationError, "ground_truth must be a string");
        c.ground_truth = gt->get<std::string>();
    }

    if (c.kind == TaskKind::MultipleChoice) {
        auto opts = rec.find("options");
        if (opts == rec.end()) throw Error(ErrorCode::ValidationError, "missing field 'options'");
        c.options = parse_options(*opts);
        for (const auto& o : c.options) {
            if (text::to_lower(o.id) == text::to_lower(c.ground_truth)) c.ground_truth = o.id;
        }
    }
    c.validate();
    return c;
}

} // namespace

std::vector<BenchCase> load_dataset(const std::filesystem::path& path, BenchFormat format) {
    if (!std::filesystem::is_regular_file(path)) {
        throw Error(ErrorCode::ValidationError, "dataset file not found: " + path.string());
    }
    std::vector<BenchCase> cases;
    json problems = json::array();
    std::set<std::string> seen;
    for_each_jsonl(
        path,
        [&](size_t line, const json& rec) {
            try {
                auto c = parse_record(rec, format);
                if (!seen.insert(c.case_id).second) {
                    throw Error(ErrorCode::ValidationError, "duplicate case_id '" + c.case_id + "'");
                }
                cases.push_back(std::move(c));
            } catch (const Error& e) {
                problems.push_back({{"line", line}, {"message", e.message()}});
            }
        },
        [&](size_t line, const std::string& msg) { problems.push_back({{"line", line}, {"message", msg}}); });

    if (!problems.empty()) {
        const auto& first = problems.front();
        throw Error(ErrorCode::ValidationError,
                    std::to_string(problems.size()) + " invalid record(s) in " + path.string() + "; line " +
                        std::to_string(first["line"].get<size_t>()) + ": " + first["message"].get<std::string>(),
                    problems);
    }
    if (cases.empty()) throw Error(ErrorCode::ValidationError, "dataset " + path.string() + " has no records");
    return cases;
}

std::string render_question(const BenchCase& c) {
    if (c.kind != TaskKind::MultipleChoice) return c.question;
    std::string out = c.question + "\nOptions:";
    for (const auto& o : c.options) out += "\n(" + o.id + ") " + o.text;
    return out;
}

} // namespace motionagent::bench
