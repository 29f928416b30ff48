#include <map>
#include <memory>

#include "contraprost/error.hpp"
#include "contraprost/objectives.hpp"
#include "contraprost/pipeline.hpp"
#include "contraprost/prosody_dsp.hpp"
#include "contraprost/wire.hpp"
#include "pipeline_internal.hpp"

namespace contraprost::pipeline {

namespace {

using bench::CaseLabel;
using bench::Category;
using jsonl::Json;

constexpr std::size_t kMaxCandidates = 6;

CaseLabel other(CaseLabel c) { return c == CaseLabel::A ? CaseLabel::B : CaseLabel::A; }

// Auxiliary inputs, loaded only when a category present in the manifest
// needs them.
struct Inputs {
  std::map<std::string, dsp::WordAlignment> alignments;
  std::map<std::string, objectives::EmotionPosterior> posteriors;
  std::map<std::string, wire::PunctProbs> punct;
  std::filesystem::path audio_root;
  objectives::StressWeights weights;
  objectives::PolitenessWeights politeness = objectives::PolitenessWeights::defaults();
};

template <typename T>
const T& lookup(const std::map<std::string, T>& m, const std::string& ref, const char* what) {
  auto it = m.find(ref);
  if (it == m.end()) throw Error(std::string("no ") + what + " for audio '" + ref + "'");
  return it->second;
}

const dsp::WordAlignment& aligned(const Inputs& in, const std::string& ref, std::size_t expected_words,
                                  const std::string& example_id) {
  const auto& a = lookup(in.alignments, ref, "alignment");
  if (a.words.size() != expected_words)
    throw Error("example " + example_id + ": alignment of '" + ref + "' has " + std::to_string(a.words.size()) +
                " words, annotation has " + std::to_string(expected_words));
  return a;
}

std::size_t single_stress(const wire::ProsodyMarks& m, const std::string& id, CaseLabel c) {
  if (m.stressed.size() != 1)
    throw Error("example " + id + ": case " + std::string(bench::to_string(c)) +
                " must mark exactly one stressed word with '*'");
  return *m.stressed.begin();
}

// Emotion pair subcategories read "X-Y" with case A carrying X.
std::pair<objectives::Emotion, objectives::Emotion> emotion_pair(const bench::ContrastiveExample& ex) {
  const auto dash = ex.subcategory.find('-');
  if (dash == std::string::npos) throw Error("example " + ex.id + ": emotion subcategory must read X-Y");
  return {objectives::parse_emotion(ex.subcategory.substr(0, dash)),
          objectives::parse_emotion(ex.subcategory.substr(dash + 1))};
}

objectives::ObjectiveFn objective_for(const bench::ContrastiveExample& ex, CaseLabel label, const Inputs& in) {
  const auto& own = ex.get(label);
  const auto& foil_case = ex.get(other(label));
  switch (ex.category) {
    case Category::SentenceStress: {
      const auto marks = wire::parse_prosody_marks(own.prosody_text);
      const auto foil_marks = wire::parse_prosody_marks(foil_case.prosody_text);
      const std::size_t tgt = single_stress(marks, ex.id, label);
      const std::size_t foil = single_stress(foil_marks, ex.id, other(label));
      const std::size_t n = marks.words.size();
      return [&in, &ex, tgt, foil, n](const objectives::Candidate& c) {
        const auto& align = aligned(in, c.audio_ref, n, ex.id);
        const auto clip = dsp::read_wav(in.audio_root / c.audio_ref);
        const auto feats = dsp::extract_word_features(clip, align);
        const auto stress = objectives::stress_score(feats, in.weights);
        return objectives::obj_stress(stress, tgt, foil);
      };
    }
    case Category::ProsodicBreaks: {
      const auto marks = wire::parse_prosody_marks(own.prosody_text);
      const auto foil_marks = wire::parse_prosody_marks(foil_case.prosody_text);
      const std::size_t n = marks.words.size();
      if (n < 2) throw Error("example " + ex.id + ": break annotation needs at least two words");
      // Breaks shared by both cases carry no contrast; trailing tags are not gaps.
      std::set<std::size_t> tgt, foil;
      for (auto k : marks.breaks)
        if (k + 1 < n && !foil_marks.breaks.contains(k)) tgt.insert(k);
      for (auto k : foil_marks.breaks)
        if (k + 1 < n && !marks.breaks.contains(k)) foil.insert(k);
      return [&in, &ex, tgt, foil, n](const objectives::Candidate& c) {
        const auto gaps = dsp::gap_durations(aligned(in, c.audio_ref, n, ex.id));
        return objectives::obj_break(gaps, tgt, foil);
      };
    }
    case Category::IntonationPatterns: {
      const auto text = bench::normalize_whitespace(own.prosody_text);
      const auto kind = !text.empty() && text.back() == '?' ? objectives::CaseKind::Question
                                                            : objectives::CaseKind::Statement;
      return [&in, kind](const objectives::Candidate& c) {
        const auto& p = lookup(in.punct, c.audio_ref, "punctuation probabilities");
        return objectives::obj_intonation(p.p_period, p.p_excl, p.p_quest, kind);
      };
    }
    case Category::EmotionalProsody: {
      const auto [ea, eb] = emotion_pair(ex);
      const auto tgt = label == CaseLabel::A ? ea : eb;
      const auto foil = label == CaseLabel::A ? eb : ea;
      return [&in, tgt, foil](const objectives::Candidate& c) {
        return objectives::obj_emotion(lookup(in.posteriors, c.audio_ref, "emotion posterior"), tgt, foil);
      };
    }
    case Category::Politeness: {
      using objectives::PolitenessKind;
      const auto tgt = label == CaseLabel::A ? PolitenessKind::Polite : PolitenessKind::Impolite;
      const auto foil = label == CaseLabel::A ? PolitenessKind::Impolite : PolitenessKind::Polite;
      return [&in, tgt, foil](const objectives::Candidate& c) {
        return objectives::obj_politeness(lookup(in.posteriors, c.audio_ref, "emotion posterior"), in.politeness, tgt,
                                          foil);
      };
    }
  }
  throw Error("example " + ex.id + ": unhandled category");
}

Json selection_json(const objectives::Selection& s) {
  if (!s.best) return nullptr;
  return Json{{"voice_id", s.best->voice_id}, {"audio_ref", s.best->audio_ref}, {"objective", *s.best->objective}};
}

struct Tally {
  std::size_t total = 0, kept = 0, all_invalid = 0, below_threshold = 0;
};

}  // namespace

CommandResult cmd_rank_candidates(const RunConfig& cfg) {
  detail::require_file(cfg.manifest_path, "manifest");
  detail::require_file(cfg.candidates_path, "candidates file");
  const auto examples = bench::load_manifest(cfg.manifest_path, detail::lang_set(cfg));
  const auto rows = wire::load_candidates(cfg.candidates_path);

  std::set<Category> present;
  for (const auto& ex : examples) present.insert(ex.category);
  auto inputs = std::make_unique<Inputs>();
  inputs->audio_root = cfg.audio_root.empty() ? cfg.manifest_path.parent_path() : cfg.audio_root;
  inputs->weights = cfg.stress_weights;
  if (present.contains(Category::SentenceStress) || present.contains(Category::ProsodicBreaks)) {
    detail::require_file(cfg.alignments_path, "alignments file");
    inputs->alignments = wire::load_alignments(cfg.alignments_path);
  }
  if (present.contains(Category::EmotionalProsody) || present.contains(Category::Politeness)) {
    detail::require_file(cfg.posteriors_path, "posteriors file");
    inputs->posteriors = wire::load_posteriors(cfg.posteriors_path);
  }
  if (present.contains(Category::IntonationPatterns)) {
    detail::require_file(cfg.punct_probs_path, "punctuation probabilities file");
    inputs->punct = wire::load_punct_probs(cfg.punct_probs_path);
  }

  std::map<std::pair<std::string, CaseLabel>, std::vector<const wire::CandidateRow*>> by_case;
  std::set<std::string> ids;
  for (const auto& ex : examples) ids.insert(ex.id);
  std::size_t ignored = 0;
  for (const auto& r : rows) {
    if (!ids.contains(r.example_id)) {
      ++ignored;
      continue;
    }
    by_case[{r.example_id, r.case_label}].push_back(&r);
  }

  CommandResult result;
  const Json meta = run_meta(cfg, "rank-candidates");
  std::vector<bench::ContrastiveExample> ranked;
  std::vector<Json> report_lines;
  std::map<std::pair<Category, std::string>, Tally> tallies;
  for (auto c : bench::all_categories())
    for (const auto& sub : bench::subcategories_of(c)) tallies[{c, sub}];

  for (const auto& ex : examples) {
    const double threshold = cfg.threshold_for(ex.category);
    const auto reference = objectives::wer_tokens(ex.sentence);
    bench::FilterReport verdict;
    verdict.example_id = ex.id;
    Json line;
    line["example_id"] = ex.id;
    line["category"] = bench::to_string(ex.category);
    line["subcategory"] = ex.subcategory;
    bench::ContrastiveExample out = ex;
    for (CaseLabel label : {CaseLabel::A, CaseLabel::B}) {
      const char* key = label == CaseLabel::A ? "case_a" : "case_b";
      auto it = by_case.find({ex.id, label});
      if (it == by_case.end()) {
        result.messages.push_back("warning: example " + ex.id + " case " + std::string(bench::to_string(label)) +
                                  " has no candidates");
        verdict.add(bench::FilterReason::AllCandidatesInvalid);
        line[key] = nullptr;
        continue;
      }
      if (it->second.size() > kMaxCandidates)
        throw Error("example " + ex.id + " case " + std::string(bench::to_string(label)) + " has " +
                    std::to_string(it->second.size()) + " candidates (at most 6)");
      std::vector<objectives::Candidate> cands;
      for (const auto* r : it->second) {
        objectives::Candidate c{r->voice_id, r->audio_ref, r->transcript, 0.0, std::nullopt};
        c.wer = r->wer ? *r->wer : objectives::word_error_rate(reference, objectives::wer_tokens(r->transcript));
        cands.push_back(std::move(c));
      }
      const auto sel = objectives::select_candidates(cands, objective_for(ex, label, *inputs), threshold);
      verdict.merge(sel.verdict);
      line[key] = selection_json(sel);
      if (sel.best) out.get(label).audio_ref = sel.best->audio_ref;
    }
    line["verdict"] = bench::to_string(verdict.verdict);
    line["reasons"] = detail::report_json(verdict)["reasons"];
    report_lines.push_back(std::move(line));

    const auto canonical = bench::canonical_subcategory(ex.category, ex.subcategory);
    auto& t = tallies[{ex.category, canonical.value_or(ex.subcategory)}];
    ++t.total;
    if (verdict.kept()) {
      ++t.kept;
      ranked.push_back(std::move(out));
    }
    for (auto r : verdict.reasons) {
      if (r == bench::FilterReason::AllCandidatesInvalid) ++t.all_invalid;
      if (r == bench::FilterReason::BelowObjectiveThreshold) ++t.below_threshold;
    }
  }
  if (ignored > 0)
    result.messages.push_back("warning: " + std::to_string(ignored) + " candidates name examples outside the manifest");

  Json sub_rows = Json::array();
  std::vector<std::vector<std::string>> table;
  Tally total;
  for (const auto& [key, t] : tallies) {
    sub_rows.push_back({{"category", bench::to_string(key.first)},
                        {"subcategory", key.second},
                        {"total", t.total},
                        {"kept", t.kept},
                        {"dropped", t.total - t.kept},
                        {"all_candidates_invalid", t.all_invalid},
                        {"below_objective_threshold", t.below_threshold}});
    table.push_back({std::string(bench::to_string(key.first)) + " / " + key.second, std::to_string(t.total),
                     std::to_string(t.kept), std::to_string(t.all_invalid), std::to_string(t.below_threshold)});
    total.total += t.total;
    total.kept += t.kept;
    total.all_invalid += t.all_invalid;
    total.below_threshold += t.below_threshold;
  }
  table.push_back({"Total", std::to_string(total.total), std::to_string(total.kept), std::to_string(total.all_invalid),
                   std::to_string(total.below_threshold)});

  Json summary;
  summary["_meta"] = meta;
  summary["total"] = total.total;
  summary["kept"] = total.kept;
  summary["dropped"] = total.total - total.kept;
  summary["subcategories"] = sub_rows;

  const auto& dir = cfg.output_dir;
  bench::save_manifest(dir / "ranked_manifest.jsonl", ranked, &meta);
  jsonl::write_lines(dir / "selection_report.jsonl", report_lines, &meta);
  detail::write_json(dir / "rank_summary.json", summary);
  jsonl::write_text(dir / "rank_summary.txt",
                    format_table({"Subcategory", "Total", "Synthesised", "No valid voice", "Below threshold"}, table));
  result.outputs = {dir / "ranked_manifest.jsonl", dir / "selection_report.jsonl", dir / "rank_summary.json",
                    dir / "rank_summary.txt"};
  return result;
}

}  // namespace contraprost::pipeline
