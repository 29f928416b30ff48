#include <map>

#include "contraprost/benchmark.hpp"
#include "contraprost/error.hpp"
#include "contraprost/pipeline.hpp"
#include "pipeline_internal.hpp"

namespace contraprost::pipeline {

using jsonl::Json;

CommandResult cmd_filter(const RunConfig& cfg) {
  detail::require_file(cfg.manifest_path, "manifest");
  if (cfg.langs.empty()) throw Error("no target languages configured");
  const auto examples = bench::load_manifest(cfg.manifest_path, detail::lang_set(cfg));
  const Json meta = run_meta(cfg, "filter");

  CommandResult result;
  Json per_lang = Json::object();
  std::vector<std::vector<std::string>> table;
  for (const auto& lang : cfg.langs) {
    std::vector<bench::ContrastiveExample> kept;
    std::vector<Json> reports;
    std::map<std::string, std::size_t> reason_counts;
    std::map<std::string, std::pair<std::size_t, std::size_t>> by_category;  // kept, dropped
    for (const auto& ex : examples) {
      const auto report = bench::filter_example(ex, lang);
      reports.push_back(detail::report_json(report));
      auto& cat = by_category[std::string(bench::to_string(ex.category))];
      if (report.kept()) {
        kept.push_back(ex);
        ++cat.first;
      } else {
        ++cat.second;
      }
      for (auto r : report.reasons) ++reason_counts[std::string(bench::to_string(r))];
    }
    const auto manifest_out = cfg.output_dir / ("filtered_" + lang + ".jsonl");
    const auto report_out = cfg.output_dir / ("filter_report_" + lang + ".jsonl");
    bench::save_manifest(manifest_out, kept, &meta);
    jsonl::write_lines(report_out, reports, &meta);
    result.outputs.push_back(manifest_out);
    result.outputs.push_back(report_out);

    Json s;
    s["total"] = examples.size();
    s["kept"] = kept.size();
    s["dropped"] = examples.size() - kept.size();
    s["reasons"] = Json::object();
    for (const auto& [r, n] : reason_counts) s["reasons"][r] = n;
    s["by_category"] = Json::object();
    for (const auto& [c, kd] : by_category) s["by_category"][c] = {{"kept", kd.first}, {"dropped", kd.second}};
    per_lang[lang] = s;

    auto count_of = [&](const char* r) {
      auto it = reason_counts.find(r);
      return std::to_string(it == reason_counts.end() ? 0 : it->second);
    };
    table.push_back({lang, std::to_string(examples.size()), std::to_string(kept.size()),
                     count_of("IdenticalTranslations"), count_of("LengthRatioOutOfRange")});
  }

  Json summary;
  summary["_meta"] = meta;
  summary["languages"] = per_lang;
  detail::write_json(cfg.output_dir / "filter_summary.json", summary);
  jsonl::write_text(cfg.output_dir / "filter_summary.txt",
                    format_table({"Lang", "Total", "Kept", "Identical", "Length ratio"}, table));
  result.outputs.push_back(cfg.output_dir / "filter_summary.json");
  result.outputs.push_back(cfg.output_dir / "filter_summary.txt");
  return result;
}

}  // namespace contraprost::pipeline
