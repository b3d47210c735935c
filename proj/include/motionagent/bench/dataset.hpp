#pragma once

#include "motionagent/common/media.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace motionagent::bench {

enum class TaskKind { FreeQA, MultipleChoice, RepCount };

std::string_view to_string(TaskKind k) noexcept;

/// Dataset layouts: MoVid-Bench, BABEL-QA, MVBench and Mo-RepCount shaped.
enum class BenchFormat { MoVid, BabelQA, MVBench, RepCount };

std::string_view to_string(BenchFormat f) noexcept;
/// Accepts "movid", "babelqa", "mvbench", "repcount". Throws UnknownFormat.
BenchFormat bench_format_from_string(std::string_view tag);

TaskKind task_kind_of(BenchFormat f) noexcept;

/// Category tags a format accepts, in report column order. Empty for
/// RepCount, whose categories are free-form.
const std::vector<std::string>& format_categories(BenchFormat f);

struct ChoiceOption {
    std::string id;
    std::string text;
};

struct BenchCase {
    std::string case_id;
    TaskKind kind = TaskKind::FreeQA;
    std::string category;
    MediaRef media;
    std::string question;
    /// Answer text, option id, or the decimal count for RepCount.
    std::string ground_truth;
    std::optional<long long> truth_count;
    std::vector<ChoiceOption> options;

    /// Throws ValidationError.
    void validate() const;
};

void to_json(json& j, const BenchCase& c);

/// Reads a JSONL dataset. Every line is checked; all problems are reported
/// together in one ValidationError whose detail lists {line, message}.
///
/// Record fields: case_id, category, media {id, motion?, video?}, question,
/// ground_truth, and options for MultipleChoice, either ["walking", ...]
/// (ids A, B, ...) or [{"id": "A", "text": "walking"}, ...].
std::vector<BenchCase> load_dataset(const std::filesystem::path& path, BenchFormat format);

/// Question text sent to the engine; multiple choice appends the options.
std::string render_question(const BenchCase& c);

} // namespace motionagent::bench
