#include <map>
#include <set>
#include <tuple>

#include "contraprost/contrastive.hpp"
#include "contraprost/error.hpp"
#include "contraprost/pipeline.hpp"
#include "pipeline_internal.hpp"

namespace contraprost::pipeline {

namespace {

using contrastive::AgreementSet;
using contrastive::ExampleVerdict;
using contrastive::Metric;
using jsonl::Json;

// (model_id, metric) -> example_id -> agreement values
using AgreementTable = std::map<std::pair<std::string, Metric>, std::map<std::string, AgreementSet>>;

struct Collected {
  AgreementTable table;
  std::map<std::string, std::vector<contrastive::QualityRecord>> correct_quality;  // by model
  std::size_t ignored = 0;
  std::set<std::string> unknown_ids;
  std::vector<std::string> warnings;
};

bool wanted(const RunConfig& cfg, Metric m) { return !cfg.metric || *cfg.metric == m; }

void put(Collected& c, const std::string& model, Metric metric, const std::string& id, bench::CaseLabel audio,
         bench::CaseLabel ref, double value) {
  auto& slot = c.table[{model, metric}][id].at(audio, ref);
  if (slot)
    throw Error("duplicate " + std::string(contrastive::to_string(metric)) + " record for example " + id +
                " (model " + model + ", audio " + std::string(bench::to_string(audio)) + ", reference " +
                std::string(bench::to_string(ref)) + ")");
  slot = value;
}

Collected collect(const RunConfig& cfg, const contrastive::ScoreSet& scores, const std::set<std::string>& ids) {
  Collected c;
  auto known = [&](const std::string& id) {
    if (ids.contains(id)) return true;
    ++c.ignored;
    c.unknown_ids.insert(id);
    return false;
  };
  if (wanted(cfg, Metric::Likelihood)) {
    for (const auto& r : scores.likelihood) {
      if (!known(r.example_id)) continue;
      put(c, r.model_id, Metric::Likelihood, r.example_id, r.audio_case, r.ref_case,
          contrastive::normalized_likelihood(r, cfg.norm_mode));
    }
    for (const auto& r : scores.cascade) {
      if (!known(r.example_id)) continue;
      if (auto w = contrastive::cascade_length_warning(r)) c.warnings.push_back(*w);
      put(c, r.model_id, Metric::Likelihood, r.example_id, r.audio_case, r.ref_case,
          contrastive::cascade_likelihood(r, cfg.norm_mode));
    }
  }
  if (wanted(cfg, Metric::Quality)) {
    for (const auto& r : scores.quality) {
      if (!known(r.example_id)) continue;
      put(c, r.model_id, Metric::Quality, r.example_id, r.audio_case, r.ref_case, contrastive::quality_agreement(r));
      if (r.audio_case == r.ref_case) c.correct_quality[r.model_id].push_back(r);
    }
  }
  return c;
}

Json group_json(const contrastive::GroupRow& g) {
  return Json{{"directional_pct", g.directional_pct}, {"global_pct", g.global_pct}, {"count", g.count}};
}

Json breakdown(const std::vector<ExampleVerdict>& verdicts, contrastive::GroupBy by,
               const contrastive::GroupIndex& index) {
  Json out = Json::object();
  if (verdicts.empty()) return out;
  for (const auto& g : contrastive::aggregate(verdicts, by, index)) out[g.group] = group_json(g);
  return out;
}

const char* metric_column(Metric m) { return m == Metric::Likelihood ? "contrastive_likelihood" : "contrastive_quality"; }

}  // namespace

CommandResult cmd_evaluate(const RunConfig& cfg) {
  detail::require_file(cfg.manifest_path, "manifest");
  if (cfg.scores_paths.empty()) throw Error("no scores files configured");
  for (const auto& p : cfg.scores_paths) detail::require_file(p, "scores file");

  const auto examples = bench::load_manifest(cfg.manifest_path, detail::lang_set(cfg));
  contrastive::ScoreSet scores;
  for (const auto& p : cfg.scores_paths) scores.append(contrastive::load_scores(p, cfg.max_hypotheses));

  std::set<std::string> ids;
  for (const auto& ex : examples) ids.insert(ex.id);
  Collected col = collect(cfg, scores, ids);
  if (col.table.empty()) throw Error("no example ids overlap between the manifest and the scores");

  CommandResult result;
  const auto index = contrastive::make_group_index(examples);
  const Json meta = run_meta(cfg, "evaluate");

  std::vector<Json> verdict_lines;
  Json missing = Json::array();
  std::map<std::string, std::map<Metric, std::vector<ExampleVerdict>>> by_model;
  for (const auto& [key, per_example] : col.table) {
    const auto& [model, metric] = key;
    auto& bucket = by_model[model][metric];
    for (const auto& ex : examples) {
      auto it = per_example.find(ex.id);
      const auto absent = it == per_example.end() ? AgreementSet{}.missing() : it->second.missing();
      if (!absent.empty()) {
        Json m{{"example_id", ex.id}, {"model_id", model}, {"metric", contrastive::to_string(metric)},
               {"missing", absent}};
        missing.push_back(m);
        std::string note = "missing " + std::string(contrastive::to_string(metric)) + " data for example " + ex.id +
                           " (model " + model + "):";
        for (const auto& a : absent) note += " " + a;
        result.messages.push_back(note);
        continue;
      }
      auto v = contrastive::evaluate_example(ex.id, model, metric, it->second);
      verdict_lines.push_back(contrastive::to_json(v));
      bucket.push_back(std::move(v));
    }
  }

  Json rows = Json::array();
  Json by_category = Json::object();
  Json by_subcategory = Json::object();
  std::vector<std::vector<std::string>> table;
  for (const auto& [model, metrics] : by_model) {
    Json row;
    row["model"] = model;
    std::vector<std::string> cells{model};
    for (Metric m : {Metric::Likelihood, Metric::Quality}) {
      auto it = metrics.find(m);
      if (it == metrics.end() || it->second.empty()) {
        row[metric_column(m)] = nullptr;
        cells.insert(cells.end(), {"-", "-"});
        continue;
      }
      const auto all = contrastive::aggregate(it->second, contrastive::GroupBy::All);
      row[metric_column(m)] = group_json(all.front());
      cells.push_back(detail::fixed(all.front().directional_pct, 1));
      cells.push_back(detail::fixed(all.front().global_pct, 1));
      by_category[model][metric_column(m)] = breakdown(it->second, contrastive::GroupBy::Category, index);
      by_subcategory[model][metric_column(m)] = breakdown(it->second, contrastive::GroupBy::Subcategory, index);
    }
    auto q = col.correct_quality.find(model);
    if (q != col.correct_quality.end()) {
      const double mean = contrastive::standard_quality(q->second);
      row["xcomet_mean"] = mean;
      cells.push_back(detail::fixed(mean, 4));
    } else {
      row["xcomet_mean"] = nullptr;
      cells.push_back("-");
    }
    rows.push_back(row);
    table.push_back(cells);
  }

  Json warnings = Json::array();
  for (const auto& w : col.warnings) warnings.push_back(w);
  if (col.ignored > 0) {
    std::string w = std::to_string(col.ignored) + " score records name examples outside the manifest:";
    std::size_t shown = 0;
    for (const auto& id : col.unknown_ids) {
      if (shown++ == 10) {
        w += " ...";
        break;
      }
      w += " " + id;
    }
    warnings.push_back(w);
  }
  for (const auto& w : warnings) result.messages.push_back("warning: " + w.get<std::string>());

  Json summary;
  summary["_meta"] = meta;
  summary["examples"] = examples.size();
  summary["rows"] = rows;
  summary["by_category"] = by_category;
  summary["by_subcategory"] = by_subcategory;
  summary["missing"] = missing;
  summary["warnings"] = warnings;
  summary["ignored_records"] = col.ignored;

  const auto out = cfg.output_dir;
  jsonl::write_lines(out / "verdicts.jsonl", verdict_lines, &meta);
  detail::write_json(out / "summary.json", summary);
  std::string text = format_table({"Model", "CL dir %", "CL glob %", "CQ dir %", "CQ glob %", "xCOMET"}, table);
  text += "\nCL = contrastive likelihood, CQ = contrastive quality; config " + cfg.hash() + "\n";
  jsonl::write_text(out / "summary.txt", text);
  result.outputs = {out / "verdicts.jsonl", out / "summary.json", out / "summary.txt"};
  if (!missing.empty()) result.exit_code = kExitPartial;
  return result;
}

}  // namespace contraprost::pipeline
