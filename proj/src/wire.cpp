#include "contraprost/wire.hpp"

#include <cmath>

#include "contraprost/error.hpp"
#include "contraprost/jsonl.hpp"

namespace contraprost::wire {

using jsonl::Json;

namespace {

std::string str_at(const Json& j, const char* k) {
  if (!j.contains(k) || !j[k].is_string()) throw Error(std::string("field '") + k + "' must be a string");
  return j[k].get<std::string>();
}

double num_at(const Json& j, const char* k) {
  if (!j.contains(k) || !j[k].is_number()) throw Error(std::string("field '") + k + "' must be a number");
  const double v = j[k].get<double>();
  if (!std::isfinite(v)) throw Error(std::string("field '") + k + "' must be finite");
  return v;
}

template <typename Fn>
void each(const std::filesystem::path& path, Fn&& fn) {
  jsonl::for_each_line(path, [&](const Json& j, std::size_t line) {
    try {
      if (!j.is_object()) throw Error("expected a JSON object");
      fn(j);
    } catch (const Error& e) {
      throw Error(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  });
}

template <typename T>
void insert_unique(std::map<std::string, T>& m, std::string key, T value) {
  if (!m.emplace(key, std::move(value)).second) throw Error("duplicate audio_ref '" + key + "'");
}

}  // namespace

std::vector<CandidateRow> load_candidates(const std::filesystem::path& path) {
  std::vector<CandidateRow> out;
  each(path, [&](const Json& j) {
    CandidateRow r;
    r.example_id = str_at(j, "example_id");
    r.case_label = bench::parse_case_label(str_at(j, "case"));
    r.voice_id = str_at(j, "voice_id");
    r.audio_ref = str_at(j, "audio_ref");
    r.transcript = str_at(j, "transcript");
    if (j.contains("wer") && !j["wer"].is_null()) {
      r.wer = num_at(j, "wer");
      if (*r.wer < 0.0) throw Error("field 'wer' must be >= 0");
    }
    out.push_back(std::move(r));
  });
  return out;
}

void save_candidates(const std::filesystem::path& path, const std::vector<CandidateRow>& rows) {
  std::vector<Json> lines;
  for (const auto& r : rows) {
    Json j;
    j["example_id"] = r.example_id;
    j["case"] = bench::to_string(r.case_label);
    j["voice_id"] = r.voice_id;
    j["audio_ref"] = r.audio_ref;
    j["transcript"] = r.transcript;
    if (r.wer) j["wer"] = *r.wer;
    lines.push_back(std::move(j));
  }
  jsonl::write_lines(path, lines);
}

std::map<std::string, dsp::WordAlignment> load_alignments(const std::filesystem::path& path) {
  std::map<std::string, dsp::WordAlignment> out;
  each(path, [&](const Json& j) {
    const auto ref = str_at(j, "audio_ref");
    if (!j.contains("words") || !j["words"].is_array()) throw Error("field 'words' must be an array");
    dsp::WordAlignment a;
    for (const auto& w : j["words"]) {
      if (!w.is_object()) throw Error("word entries must be objects");
      a.words.push_back({str_at(w, "text"), num_at(w, "start_s"), num_at(w, "end_s")});
    }
    dsp::validate(a);
    insert_unique(out, ref, std::move(a));
  });
  return out;
}

void save_alignments(const std::filesystem::path& path, const std::map<std::string, dsp::WordAlignment>& rows) {
  std::vector<Json> lines;
  for (const auto& [ref, a] : rows) {
    Json j;
    j["audio_ref"] = ref;
    j["words"] = Json::array();
    for (const auto& w : a.words) j["words"].push_back({{"text", w.text}, {"start_s", w.start_s}, {"end_s", w.end_s}});
    lines.push_back(std::move(j));
  }
  jsonl::write_lines(path, lines);
}

std::map<std::string, objectives::EmotionPosterior> load_posteriors(const std::filesystem::path& path) {
  std::map<std::string, objectives::EmotionPosterior> out;
  each(path, [&](const Json& j) {
    const auto ref = str_at(j, "audio_ref");
    if (!j.contains("probs") || !j["probs"].is_object()) throw Error("field 'probs' must be an object");
    objectives::EmotionPosterior post;
    for (auto e : objectives::all_emotions()) post.probs[e] = 0.0;
    for (const auto& [name, p] : j["probs"].items()) {
      if (!p.is_number()) throw Error("probability of '" + name + "' must be a number");
      post.probs[objectives::parse_emotion(name)] = p.get<double>();
    }
    objectives::validate(post);
    insert_unique(out, ref, std::move(post));
  });
  return out;
}

void save_posteriors(const std::filesystem::path& path,
                     const std::map<std::string, objectives::EmotionPosterior>& rows) {
  std::vector<Json> lines;
  for (const auto& [ref, post] : rows) {
    Json j;
    j["audio_ref"] = ref;
    j["probs"] = Json::object();
    for (auto e : objectives::all_emotions()) j["probs"][std::string(objectives::to_string(e))] = post.at(e);
    lines.push_back(std::move(j));
  }
  jsonl::write_lines(path, lines);
}

std::map<std::string, PunctProbs> load_punct_probs(const std::filesystem::path& path) {
  std::map<std::string, PunctProbs> out;
  each(path, [&](const Json& j) {
    PunctProbs p{num_at(j, "p_period"), num_at(j, "p_excl"), num_at(j, "p_quest")};
    for (double v : {p.p_period, p.p_excl, p.p_quest})
      if (v < 0.0 || v > 1.0) throw Error("punctuation probabilities must lie in [0,1]");
    insert_unique(out, str_at(j, "audio_ref"), p);
  });
  return out;
}

void save_punct_probs(const std::filesystem::path& path, const std::map<std::string, PunctProbs>& rows) {
  std::vector<Json> lines;
  for (const auto& [ref, p] : rows)
    lines.push_back({{"audio_ref", ref}, {"p_period", p.p_period}, {"p_excl", p.p_excl}, {"p_quest", p.p_quest}});
  jsonl::write_lines(path, lines);
}

ProsodyMarks parse_prosody_marks(std::string_view text) {
  ProsodyMarks out;
  std::string word;
  bool starred = false;
  auto flush = [&] {
    if (word.empty()) {
      if (starred) throw Error("stray '*' in annotation");
      return;
    }
    if (starred) out.stressed.insert(out.words.size());
    out.words.push_back(word);
    word.clear();
    starred = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '<') {
      const auto close = text.find('>', i);
      if (close == std::string_view::npos) throw Error("unterminated '<' tag in annotation");
      flush();
      // A tag before the first word is not between two words.
      if (!out.words.empty()) out.breaks.insert(out.words.size() - 1);
      i = close;
    } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      flush();
    } else if (c == '*') {
      starred = true;
    } else {
      word.push_back(c);
    }
  }
  flush();
  return out;
}

}  // namespace contraprost::wire
