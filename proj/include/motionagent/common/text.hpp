#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace motionagent::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Casefold, trim and collapse internal whitespace runs to one space.
std::string normalize(std::string_view s);

/// Lowercased alphanumeric runs, in order of appearance.
std::vector<std::string> tokenize(std::string_view s);
std::set<std::string> token_set(std::string_view s);

/// |A ∩ B| / |A ∪ B|; two empty sets are defined as similarity 1.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

bool starts_with(std::string_view s, std::string_view prefix);
bool contains(std::string_view haystack, std::string_view needle);

/// First non-negative integer literal in the text, if any.
bool first_integer(std::string_view s, long long& out);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

} // namespace motionagent::text
