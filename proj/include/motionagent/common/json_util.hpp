#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace motionagent {

using json = nlohmann::json;

/// Compact dump with sorted keys. nlohmann::json stores objects in a
/// std::map, so two equal documents always dump to the same bytes.
std::string canonical_dump(const json& value);

/// Locates the outermost JSON object in free text (model output that wraps
/// JSON in prose or code fences). Returns nullopt when nothing parses.
std::optional<json> extract_json_object(std::string_view text);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file, flushes to disk, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

/// Invokes `fn(line_number, parsed)` for each non-blank line; line numbers
/// are 1-based. Parse failures are reported through `on_error`.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(size_t, const json&)>& fn,
                    const std::function<void(size_t, const std::string&)>& on_error);

template <typename T>
T value_or(const json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    return it->get<T>();
}

} // namespace motionagent
