#include <algorithm>
#include <cstdio>

#include "contraprost/error.hpp"
#include "contraprost/pipeline.hpp"
#include "pipeline_internal.hpp"

namespace contraprost::pipeline {

namespace detail {

void require_file(const std::filesystem::path& path, const char* what) {
  if (path.empty()) throw Error(std::string("no ") + what + " configured");
  if (!std::filesystem::is_regular_file(path)) throw Error(std::string(what) + " not found: " + path.string());
}

std::set<std::string> lang_set(const RunConfig& cfg) { return {cfg.langs.begin(), cfg.langs.end()}; }

void write_json(const std::filesystem::path& path, const jsonl::Json& j) { jsonl::write_text(path, j.dump(2) + "\n"); }

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

jsonl::Json report_json(const bench::FilterReport& r) {
  jsonl::Json j;
  j["example_id"] = r.example_id;
  j["verdict"] = bench::to_string(r.verdict);
  j["reasons"] = jsonl::Json::array();
  for (auto reason : r.reasons) j["reasons"].push_back(bench::to_string(reason));
  return j;
}

}  // namespace detail

jsonl::Json run_meta(const RunConfig& cfg, const std::string& command) {
  jsonl::Json m;
  m["command"] = command;
  m["config_hash"] = cfg.hash();
  m["seed"] = cfg.bootstrap.seed;
  m["norm_mode"] = contrastive::to_string(cfg.norm_mode);
  m["thresholds"] = jsonl::Json::object();
  for (auto c : bench::all_categories()) m["thresholds"][std::string(bench::to_string(c))] = cfg.threshold_for(c);
  return m;
}

std::string format_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  auto widen = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) width[i] = std::max(width[i], r[i].size());
  };
  widen(header);
  for (const auto& r : rows) widen(r);

  auto line = [&](const std::vector<std::string>& r) {
    std::string out;
    for (std::size_t i = 0; i < width.size(); ++i) {
      const std::string cell = i < r.size() ? r[i] : "";
      const std::string pad(width[i] - cell.size(), ' ');
      if (i) out += "  ";
      out += i == 0 ? cell + pad : pad + cell;
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };
  std::string out = line(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
  for (const auto& r : rows) out += line(r);
  return out;
}

}  // namespace contraprost::pipeline
