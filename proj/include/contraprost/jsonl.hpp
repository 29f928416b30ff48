#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace contraprost::jsonl {

using Json = nlohmann::ordered_json;

// Key of the optional first-line run metadata object written by the CLI.
inline constexpr const char* kMetaKey = "_meta";

// Calls `fn(object, line_number)` for every non-blank line. A leading
// `{"_meta": ...}` line is skipped. Parse failures raise contraprost::Error
// naming the file and 1-based line number.
void for_each_line(const std::filesystem::path& path,
                   const std::function<void(const Json&, std::size_t)>& fn);

// Writes one compact JSON object per line, optionally preceded by a metadata
// line.
void write_lines(const std::filesystem::path& path, const std::vector<Json>& rows,
                 const Json* meta = nullptr);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace contraprost::jsonl
