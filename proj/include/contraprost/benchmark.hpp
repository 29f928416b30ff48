#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "contraprost/jsonl.hpp"

namespace contraprost::bench {

enum class Category { SentenceStress, ProsodicBreaks, IntonationPatterns, EmotionalProsody, Politeness };
enum class CaseLabel { A, B };

std::string_view to_string(Category c);
std::string_view to_string(CaseLabel c);
Category parse_category(std::string_view s);
CaseLabel parse_case_label(std::string_view s);
const std::vector<Category>& all_categories();

// The 27 subcategories: 4 stress, 6 break, 15 emotion pairs, and one each
// for intonation and politeness (named after the category).
const std::vector<std::string>& subcategories_of(Category c);

// Maps a subcategory spelling onto its canonical name, or nullopt when the
// name does not belong to `c`. Emotion pairs match in either order
// ("Angry-Neutral" == "Neutral-Angry") and case-insensitively; the two
// contrastive-stress variants "(General)" and "(Noun-Phrase)" fold into
// "Contrastive Stress".
std::optional<std::string> canonical_subcategory(Category c, std::string_view name);

using LangCode = std::string;

struct ProsodicCase {
  CaseLabel label = CaseLabel::A;
  std::string prosody_text;
  std::string meaning;
  std::string audio_ref;
  std::map<LangCode, std::string> translations;
  // The non-prosodic translation T, keyed by language like `translations`.
  std::map<LangCode, std::string> plain_translation;
};

struct ContrastiveExample {
  std::string id;
  Category category = Category::SentenceStress;
  std::string subcategory;
  std::string text_domain;
  std::string sentence;
  int self_rating = 0;
  ProsodicCase case_a;
  ProsodicCase case_b;

  const ProsodicCase& get(CaseLabel c) const { return c == CaseLabel::A ? case_a : case_b; }
  ProsodicCase& get(CaseLabel c) { return c == CaseLabel::A ? case_a : case_b; }
};

enum class FilterReason { IdenticalTranslations, LengthRatioOutOfRange, AllCandidatesInvalid, BelowObjectiveThreshold };
enum class Verdict { Keep, Drop };

std::string_view to_string(FilterReason r);
std::string_view to_string(Verdict v);

struct FilterReport {
  std::string example_id;
  Verdict verdict = Verdict::Keep;
  std::vector<FilterReason> reasons;

  // Adds `r` once and flips the verdict to Drop.
  void add(FilterReason r);
  // Union of reasons; the result drops iff either side drops.
  void merge(const FilterReport& other);
  bool kept() const { return verdict == Verdict::Keep; }
};

inline const std::set<LangCode> kDefaultLangs = {"De", "Es", "Ja"};

// Throws contraprost::Error describing the first violated invariant.
void validate(const ContrastiveExample& ex, const std::set<LangCode>& langs = kDefaultLangs);

// JSONL manifest, one example per line. Errors carry the 1-based line number;
// duplicate ids are rejected.
std::vector<ContrastiveExample> load_manifest(const std::filesystem::path& path,
                                              const std::set<LangCode>& langs = kDefaultLangs);
// Writes one line per example in field order; `meta` adds a leading
// metadata line that load_manifest skips.
void save_manifest(const std::filesystem::path& path, const std::vector<ContrastiveExample>& examples,
                   const jsonl::Json* meta = nullptr);
jsonl::Json to_json(const ContrastiveExample& ex);

// Trims and collapses internal whitespace runs to single spaces.
std::string normalize_whitespace(std::string_view s);

// Whitespace tokens, or Unicode scalar values for Japanese.
std::size_t translation_length(std::string_view text, const LangCode& lang);

FilterReport filter_identical_translations(const ContrastiveExample& ex, const LangCode& lang);

struct LengthRatioReport {
  FilterReport report;
  double ratio = 0.0;
};

// Keep iff 0.75 < len(prosodic)/len(plain) < 1.25, compared exactly on the
// integer lengths.
LengthRatioReport filter_length_ratio(std::string_view plain, std::string_view prosodic, const LangCode& lang);

// Both filters in order: identical translations, then length ratio of T
// against T_A and T_B (drop if either falls outside the window).
FilterReport filter_example(const ContrastiveExample& ex, const LangCode& lang);

}  // namespace contraprost::bench
