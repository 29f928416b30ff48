#pragma once

#include <filesystem>
#include <set>
#include <string>

#include "contraprost/config.hpp"
#include "contraprost/jsonl.hpp"

namespace contraprost::pipeline::detail {

// Throws unless `path` is set and names an existing file.
void require_file(const std::filesystem::path& path, const char* what);

std::set<std::string> lang_set(const RunConfig& cfg);

// Pretty JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const jsonl::Json& j);

std::string fixed(double v, int precision);

jsonl::Json report_json(const bench::FilterReport& r);

}  // namespace contraprost::pipeline::detail
