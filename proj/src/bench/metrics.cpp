#include "motionagent/bench/metrics.hpp"

#include "motionagent/common/error.hpp"
#include "motionagent/common/text.hpp"

#include <cmath>
#include <cstdlib>
#include <regex>

namespace motionagent::bench {

namespace {

std::vector<size_t> by_letter(const std::string& norm, const std::vector<ChoiceOption>& options) {
    static const std::regex kLead(R"(^(?:option\s+)?(?:\(([a-z])\)|([a-z])(?:[.:)]|$)))");
    static const std::regex kOption(R"(^option\s+([a-z])\b)");
    std::smatch m;
    std::string letter;
    if (std::regex_search(norm, m, kLead)) {
        for (int g = 1; g <= 2; ++g) {
            if (m[g].matched) letter = m[g].str();
        }
    } else if (std::regex_search(norm, m, kOption)) {
        letter = m[1].str();
    }
    std::vector<size_t> hits;
    if (letter.empty()) return hits;
    for (size_t i = 0; i < options.size(); ++i) {
        if (text::to_lower(options[i].id) == letter) hits.push_back(i);
    }
    return hits;
}

std::string strip_trailing_punct(std::string s) {
    while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == ',')) s.pop_back();
    return text::trim(s);
}

bool contains_run(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
    if (needle.empty() || needle.size() > hay.size()) return false;
    for (size_t i = 0; i + needle.size() <= hay.size(); ++i) {
        bool all = true;
        for (size_t k = 0; k < needle.size() && all; ++k) all = hay[i + k] == needle[k];
        if (all) return true;
    }
    return false;
}

} // namespace

std::optional<size_t> match_option(const std::string& prediction, const std::vector<ChoiceOption>& options) {
    const auto norm = text::normalize(prediction);

    auto hits = by_letter(norm, options);
    if (hits.size() == 1) return hits.front();

    hits.clear();
    const auto bare = strip_trailing_punct(norm);
    for (size_t i = 0; i < options.size(); ++i) {
        if (strip_trailing_punct(text::normalize(options[i].text)) == bare) hits.push_back(i);
    }
    if (hits.size() == 1) return hits.front();

    hits.clear();
    const auto tokens = text::tokenize(prediction);
    for (size_t i = 0; i < options.size(); ++i) {
        if (contains_run(tokens, text::tokenize(options[i].text))) hits.push_back(i);
    }
    if (hits.size() == 1) return hits.front();
    return std::nullopt;
}

bool eval_multiple_choice(const std::string& prediction, const std::vector<ChoiceOption>& options,
                          const std::string& ground_truth_id) {
    auto idx = match_option(prediction, options);
    return idx && text::to_lower(options[*idx].id) == text::to_lower(ground_truth_id);
}

RepCountMetrics repcount_metrics(const std::vector<long long>& predictions, const std::vector<long long>& truths) {
    if (predictions.size() != truths.size()) {
        throw Error(ErrorCode::LengthMismatch, "predictions and truths differ in length",
                    {{"predictions", predictions.size()}, {"truths", truths.size()}});
    }
    if (truths.empty()) throw Error(ErrorCode::EmptyInput, "no repetition counts to score");

    size_t within_one = 0;
    size_t exact = 0;
    double rel_err = 0;
    double sq_err = 0;
    for (size_t i = 0; i < truths.size(); ++i) {
        const long long t = truths[i];
        if (t < 0) throw Error(ErrorCode::InvalidArgument, "negative true count at index " + std::to_string(i));
        const long long diff = std::llabs(predictions[i] - t);
        within_one += diff <= 1;
        exact += diff == 0;
        rel_err += static_cast<double>(diff) / static_cast<double>(std::max(t, 1LL));
        sq_err += static_cast<double>(diff) * static_cast<double>(diff);
    }
    const double n = static_cast<double>(truths.size());
    RepCountMetrics m;
    m.obo = static_cast<double>(within_one) / n;
    m.obz = static_cast<double>(exact) / n;
    m.mae = rel_err / n;
    m.rmse = std::sqrt(sq_err / n);
    return m;
}

} // namespace motionagent::bench
