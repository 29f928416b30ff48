#include "contraprost/benchmark.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

#include "contraprost/error.hpp"
#include "contraprost/jsonl.hpp"

namespace contraprost::bench {

using jsonl::Json;

namespace {

constexpr std::array<std::pair<Category, std::string_view>, 5> kCategoryNames{{
    {Category::SentenceStress, "SentenceStress"},
    {Category::ProsodicBreaks, "ProsodicBreaks"},
    {Category::IntonationPatterns, "IntonationPatterns"},
    {Category::EmotionalProsody, "EmotionalProsody"},
    {Category::Politeness, "Politeness"},
}};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string> emotion_pairs() {
  // Fearful is excluded from the pair subcategories.
  const std::array<std::string_view, 6> emotions{"Angry", "Disgust", "Happy", "Neutral", "Sad", "Surprised"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < emotions.size(); ++i)
    for (std::size_t j = i + 1; j < emotions.size(); ++j)
      out.push_back(std::string(emotions[i]) + "-" + std::string(emotions[j]));
  return out;
}

std::string string_field(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(std::string("missing field '") + key + "'");
  if (!j[key].is_string()) throw Error(std::string("field '") + key + "' must be a string");
  return j[key].get<std::string>();
}

std::map<LangCode, std::string> lang_map(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(std::string("missing field '") + key + "'");
  const auto& m = j[key];
  if (!m.is_object()) throw Error(std::string("field '") + key + "' must be an object keyed by language");
  std::map<LangCode, std::string> out;
  for (const auto& [lang, text] : m.items()) {
    if (!text.is_string()) throw Error(std::string("field '") + key + "." + lang + "' must be a string");
    out.emplace(lang, text.get<std::string>());
  }
  return out;
}

ProsodicCase case_from_json(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(std::string("missing field '") + key + "'");
  const Json& c = j[key];
  if (!c.is_object()) throw Error(std::string("field '") + key + "' must be an object");
  ProsodicCase out;
  out.label = parse_case_label(string_field(c, "label"));
  out.prosody_text = string_field(c, "prosody_text");
  out.meaning = string_field(c, "meaning");
  out.audio_ref = string_field(c, "audio_ref");
  out.translations = lang_map(c, "translations");
  out.plain_translation = lang_map(c, "plain_translation");
  return out;
}

Json case_to_json(const ProsodicCase& c) {
  Json j;
  j["label"] = to_string(c.label);
  j["prosody_text"] = c.prosody_text;
  j["meaning"] = c.meaning;
  j["audio_ref"] = c.audio_ref;
  j["translations"] = Json::object();
  for (const auto& [k, v] : c.translations) j["translations"][k] = v;
  j["plain_translation"] = Json::object();
  for (const auto& [k, v] : c.plain_translation) j["plain_translation"][k] = v;
  return j;
}

ContrastiveExample example_from_json(const Json& j) {
  ContrastiveExample ex;
  ex.id = string_field(j, "id");
  ex.category = parse_category(string_field(j, "category"));
  ex.subcategory = string_field(j, "subcategory");
  ex.text_domain = string_field(j, "text_domain");
  ex.sentence = string_field(j, "sentence");
  if (!j.contains("self_rating") || !j["self_rating"].is_number_integer())
    throw Error("field 'self_rating' must be an integer");
  ex.self_rating = j["self_rating"].get<int>();
  ex.case_a = case_from_json(j, "case_a");
  ex.case_b = case_from_json(j, "case_b");
  return ex;
}

Json example_to_json(const ContrastiveExample& ex) {
  Json j;
  j["id"] = ex.id;
  j["category"] = to_string(ex.category);
  j["subcategory"] = ex.subcategory;
  j["text_domain"] = ex.text_domain;
  j["sentence"] = ex.sentence;
  j["self_rating"] = ex.self_rating;
  j["case_a"] = case_to_json(ex.case_a);
  j["case_b"] = case_to_json(ex.case_b);
  return j;
}

const std::string& translation_for(const ProsodicCase& c, const LangCode& lang, const std::string& id) {
  auto it = c.translations.find(lang);
  if (it == c.translations.end())
    throw Error("example " + id + ": case " + std::string(to_string(c.label)) + " has no " + lang + " translation");
  return it->second;
}

const std::string& plain_for(const ContrastiveExample& ex, const LangCode& lang) {
  for (const ProsodicCase* c : {&ex.case_a, &ex.case_b}) {
    auto it = c->plain_translation.find(lang);
    if (it != c->plain_translation.end()) return it->second;
  }
  throw Error("example " + ex.id + ": no plain " + lang + " translation");
}

}  // namespace

std::string_view to_string(Category c) {
  for (const auto& [cat, name] : kCategoryNames)
    if (cat == c) return name;
  return "?";
}

std::string_view to_string(CaseLabel c) { return c == CaseLabel::A ? "A" : "B"; }

Category parse_category(std::string_view s) {
  for (const auto& [cat, name] : kCategoryNames)
    if (name == s) return cat;
  throw Error("unknown category '" + std::string(s) + "'");
}

CaseLabel parse_case_label(std::string_view s) {
  if (s == "A") return CaseLabel::A;
  if (s == "B") return CaseLabel::B;
  throw Error("case label must be A or B, got '" + std::string(s) + "'");
}

const std::vector<Category>& all_categories() {
  static const std::vector<Category> cats = [] {
    std::vector<Category> out;
    for (const auto& [cat, name] : kCategoryNames) out.push_back(cat);
    return out;
  }();
  return cats;
}

const std::vector<std::string>& subcategories_of(Category c) {
  static const std::map<Category, std::vector<std::string>> table = {
      {Category::SentenceStress,
       {"Contrastive Stress", "New/Given Information", "Relational/Descriptive Adjectives",
        "Focus-sensitive Operators"}},
      {Category::ProsodicBreaks,
       {"Direct/Indirect", "Restrictive/Nonrestrictive", "VP/NP Attachment", "Phrasal Verbs", "Modifier Scope",
        "Complementizer/Parenthetical"}},
      {Category::IntonationPatterns, {"Intonation Patterns"}},
      {Category::EmotionalProsody, emotion_pairs()},
      {Category::Politeness, {"Politeness"}},
  };
  return table.at(c);
}

std::optional<std::string> canonical_subcategory(Category c, std::string_view name) {
  const std::string key = lower(normalize_whitespace(name));
  if (c == Category::SentenceStress &&
      (key == "contrastive stress (general)" || key == "contrastive stress (noun-phrase)"))
    return std::string("Contrastive Stress");
  for (const auto& sub : subcategories_of(c)) {
    if (lower(sub) == key) return sub;
    if (c == Category::EmotionalProsody) {
      const auto dash = sub.find('-');
      const std::string swapped = sub.substr(dash + 1) + "-" + sub.substr(0, dash);
      if (lower(swapped) == key) return sub;
    }
  }
  return std::nullopt;
}

std::string_view to_string(FilterReason r) {
  switch (r) {
    case FilterReason::IdenticalTranslations: return "IdenticalTranslations";
    case FilterReason::LengthRatioOutOfRange: return "LengthRatioOutOfRange";
    case FilterReason::AllCandidatesInvalid: return "AllCandidatesInvalid";
    case FilterReason::BelowObjectiveThreshold: return "BelowObjectiveThreshold";
  }
  return "?";
}

std::string_view to_string(Verdict v) { return v == Verdict::Keep ? "Keep" : "Drop"; }

void FilterReport::add(FilterReason r) {
  if (std::find(reasons.begin(), reasons.end(), r) == reasons.end()) reasons.push_back(r);
  verdict = Verdict::Drop;
}

void FilterReport::merge(const FilterReport& other) {
  for (auto r : other.reasons) add(r);
}

void validate(const ContrastiveExample& ex, const std::set<LangCode>& langs) {
  if (ex.id.empty()) throw Error("example id must be non-empty");
  const std::string where = "example " + ex.id + ": ";
  const auto last = ex.sentence.find_last_not_of(" \t\r\n");
  if (last == std::string::npos) throw Error(where + "sentence is empty");
  if (ex.sentence[last] != '.' && ex.sentence[last] != '?')
    throw Error(where + "sentence must end with '.' or '?'");
  if (ex.self_rating < 1 || ex.self_rating > 10) throw Error(where + "self_rating must be within 1..10");
  if (!canonical_subcategory(ex.category, ex.subcategory))
    throw Error(where + "subcategory '" + ex.subcategory + "' is not defined for " +
                std::string(to_string(ex.category)));
  if (ex.case_a.label != CaseLabel::A || ex.case_b.label != CaseLabel::B)
    throw Error(where + "case_a/case_b must carry labels A/B");
  if (ex.case_a.prosody_text == ex.case_b.prosody_text)
    throw Error(where + "the two cases share the same prosody_text");
  for (const ProsodicCase* c : {&ex.case_a, &ex.case_b}) {
    for (const auto* m : {&c->translations, &c->plain_translation})
      for (const auto& [lang, text] : *m)
        if (!langs.contains(lang)) throw Error(where + "unsupported target language '" + lang + "'");
  }
}

std::vector<ContrastiveExample> load_manifest(const std::filesystem::path& path, const std::set<LangCode>& langs) {
  std::vector<ContrastiveExample> out;
  std::unordered_set<std::string> seen;
  jsonl::for_each_line(path, [&](const Json& j, std::size_t line) {
    try {
      auto ex = example_from_json(j);
      validate(ex, langs);
      if (!seen.insert(ex.id).second) throw Error("duplicate id '" + ex.id + "'");
      out.push_back(std::move(ex));
    } catch (const Error& e) {
      throw Error(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  });
  return out;
}

void save_manifest(const std::filesystem::path& path, const std::vector<ContrastiveExample>& examples,
                   const Json* meta) {
  std::vector<Json> rows;
  rows.reserve(examples.size());
  for (const auto& ex : examples) rows.push_back(example_to_json(ex));
  jsonl::write_lines(path, rows, meta);
}

Json to_json(const ContrastiveExample& ex) { return example_to_json(ex); }

std::string normalize_whitespace(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char ch : s) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(ch);
  }
  return out;
}

std::size_t translation_length(std::string_view text, const LangCode& lang) {
  const std::string norm = normalize_whitespace(text);
  if (norm.empty()) return 0;
  if (lang == "Ja") {
    return static_cast<std::size_t>(
        std::count_if(norm.begin(), norm.end(), [](unsigned char b) { return (b & 0xC0) != 0x80; }));
  }
  return static_cast<std::size_t>(std::count(norm.begin(), norm.end(), ' ')) + 1;
}

FilterReport filter_identical_translations(const ContrastiveExample& ex, const LangCode& lang) {
  FilterReport rep{ex.id, Verdict::Keep, {}};
  const auto& ta = translation_for(ex.case_a, lang, ex.id);
  const auto& tb = translation_for(ex.case_b, lang, ex.id);
  if (normalize_whitespace(ta) == normalize_whitespace(tb)) rep.add(FilterReason::IdenticalTranslations);
  return rep;
}

LengthRatioReport filter_length_ratio(std::string_view plain, std::string_view prosodic, const LangCode& lang) {
  const std::size_t p = translation_length(plain, lang);
  const std::size_t q = translation_length(prosodic, lang);
  if (p == 0) throw Error("plain translation is empty");
  if (q == 0) throw Error("prosodic translation is empty");
  LengthRatioReport out;
  out.ratio = static_cast<double>(q) / static_cast<double>(p);
  // 0.75 < q/p < 1.25  <=>  3p < 4q < 5p
  const bool inside = 3 * p < 4 * q && 4 * q < 5 * p;
  if (!inside) out.report.add(FilterReason::LengthRatioOutOfRange);
  return out;
}

FilterReport filter_example(const ContrastiveExample& ex, const LangCode& lang) {
  FilterReport rep = filter_identical_translations(ex, lang);
  const auto& plain = plain_for(ex, lang);
  for (const ProsodicCase* c : {&ex.case_a, &ex.case_b})
    rep.merge(filter_length_ratio(plain, translation_for(*c, lang, ex.id), lang).report);
  return rep;
}

}  // namespace contraprost::bench
