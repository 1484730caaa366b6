#pragma once

// Prediction post-processing: whitespace word splitting with char offsets,
// strict entity decoding, and batch/file inference.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "json.hpp"
#include "seqlab/chunks.hpp"
#include "seqlab/core.hpp"
#include "seqlab/schemes.hpp"
#include "seqlab/tagger.hpp"
#include "seqlab/utf8.hpp"

namespace seqlab {

enum class PredictionLevel { Entity, Word };

struct WordPrediction {
  std::string word;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  Label label;
  std::optional<double> probability;
};

struct EntityPrediction {
  EntitySpan span;
  std::optional<double> probability;  // min over member words
};

using Prediction = std::variant<std::vector<EntityPrediction>, std::vector<WordPrediction>>;

struct PredictOptions {
  PredictionLevel level = PredictionLevel::Entity;
  bool with_probabilities = false;
  Scheme scheme = Scheme::BIO;
};

inline std::vector<WordPrediction> predict_words(const Tagger& tagger,
                                                 const utf8::IndexedText& text,
                                                 Scheme scheme) {
  const auto words = split_words(text);
  if (words.empty()) throw Error(ErrorCode::EmptyText, "text has no words");
  std::vector<std::string> surfaces;
  surfaces.reserve(words.size());
  for (const auto& w : words) surfaces.push_back(w.surface);
  const auto tagged = tagger.tag(surfaces, scheme);
  if (tagged.size() != words.size())
    throw Error(ErrorCode::TaggerLengthMismatch,
                std::to_string(tagged.size()) + " predictions for " +
                    std::to_string(words.size()) + " words");
  std::vector<WordPrediction> out;
  out.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& t = tagged[i];
    if (!scheme_allows(scheme, t.label.prefix) ||
        t.label.is_outside() != t.label.class_name.empty())
      throw Error(ErrorCode::PrefixNotInScheme,
                  "tagger emitted '" + t.label.str() + "' for word " + std::to_string(i));
    if (!(t.probability >= 0.0 && t.probability <= 1.0))
      throw Error(ErrorCode::InvalidConfig,
                  "tagger probability out of [0,1] for word " + std::to_string(i));
    out.push_back({words[i].surface, words[i].char_start, words[i].char_end, t.label,
                   t.probability});
  }
  return out;
}

/// Strict decoding of word predictions, merged into char spans.
inline std::vector<EntityPrediction> merge_entities(const utf8::IndexedText& text,
                                                    std::span<const WordPrediction> words,
                                                    Scheme scheme) {
  std::vector<Label> labels;
  labels.reserve(words.size());
  for (const auto& w : words) labels.push_back(w.label);
  std::vector<EntityPrediction> out;
  for (const auto& c : extract_entities(labels, scheme, ExtractionMode::Strict)) {
    EntityPrediction e;
    e.span.class_name = c.class_name;
    e.span.char_start = words[c.word_start].char_start;
    e.span.char_end = words[c.word_end - 1].char_end;
    e.span.word_start = c.word_start;
    e.span.word_end = c.word_end;
    e.span.surface = text.slice(e.span.char_start, e.span.char_end);
    double p = 1.0;
    for (std::size_t i = c.word_start; i < c.word_end; ++i)
      p = std::min(p, words[i].probability.value_or(1.0));
    e.probability = p;
    out.push_back(std::move(e));
  }
  return out;
}

inline Prediction predict(const Tagger& tagger, std::string_view text,
                          const PredictOptions& options = {}) {
  const utf8::IndexedText indexed(text);
  auto words = predict_words(tagger, indexed, options.scheme);
  if (options.level == PredictionLevel::Word) {
    if (!options.with_probabilities)
      for (auto& w : words) w.probability.reset();
    return words;
  }
  auto entities = merge_entities(indexed, words, options.scheme);
  if (!options.with_probabilities)
    for (auto& e : entities) e.probability.reset();
  return entities;
}

struct BatchItem {
  std::optional<Prediction> prediction;
  std::string error;

  bool ok() const noexcept { return prediction.has_value(); }
};

/// Item i corresponds to texts[i]; a failing item does not affect the others.
inline std::vector<BatchItem> predict_batch(const Tagger& tagger,
                                            std::span<const std::string> texts,
                                            const PredictOptions& options = {},
                                            unsigned workers = 1) {
  std::vector<BatchItem> out(texts.size());
  auto run = [&](std::size_t i) {
    try {
      out[i].prediction = predict(tagger, texts[i], options);
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  };
  if (workers <= 1 || !tagger.concurrent_safe() || texts.size() < 2) {
    for (std::size_t i = 0; i < texts.size(); ++i) run(i);
    return out;
  }
  const auto n = std::min<std::size_t>(workers, texts.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < n; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < texts.size(); i += n) run(i);
    });
  for (auto& t : pool) t.join();
  return out;
}

// ---------------------------------------------------------------------------
// JSON

/// Offsets are integers; keys follow char_start/char_end/token/tag.
inline nlohmann::json to_json(const EntityPrediction& e) {
  nlohmann::json j = {{"char_start", e.span.char_start},
                      {"char_end", e.span.char_end},
                      {"token", e.span.surface},
                      {"tag", e.span.class_name}};
  if (e.probability) j["probability"] = *e.probability;
  return j;
}

inline nlohmann::json to_json(const WordPrediction& w) {
  nlohmann::json j = {{"char_start", w.char_start},
                      {"char_end", w.char_end},
                      {"token", w.word},
                      {"tag", w.label.str()}};
  if (w.probability) j["probability"] = *w.probability;
  return j;
}

inline nlohmann::json to_json(const Prediction& p) {
  nlohmann::json arr = nlohmann::json::array();
  std::visit([&](const auto& items) {
    for (const auto& item : items) arr.push_back(to_json(item));
  }, p);
  return arr;
}

// ---------------------------------------------------------------------------
// File inference

struct FileSummary {
  std::size_t processed = 0;
  std::size_t failed = 0;
};

struct FileOptions {
  PredictOptions predict;
  std::size_t batch_size = 64;
  unsigned workers = 1;
};

/// Reads JSONL {"text": ...} and writes one output line per input line:
/// {"text", "predictions"} or {"error", "line"}. Memory is bounded by one batch.
inline FileSummary predict_stream(const Tagger& tagger, std::istream& in, std::ostream& out,
                                  const FileOptions& options = {}) {
  FileSummary summary;
  const auto batch_size = std::max<std::size_t>(options.batch_size, 1);
  std::vector<std::optional<std::string>> texts;
  std::vector<std::string> parse_errors;
  std::vector<std::size_t> lines;
  std::size_t line_no = 0;

  auto flush = [&] {
    std::vector<std::string> valid;
    for (const auto& t : texts)
      if (t) valid.push_back(*t);
    const auto results = predict_batch(tagger, valid, options.predict, options.workers);
    std::size_t k = 0;
    for (std::size_t i = 0; i < texts.size(); ++i) {
      nlohmann::json line;
      if (!texts[i]) {
        line = {{"error", parse_errors[i]}, {"line", lines[i]}};
        ++summary.failed;
      } else {
        const auto& r = results[k++];
        if (r.ok()) {
          line = {{"text", *texts[i]}, {"predictions", to_json(*r.prediction)}};
          ++summary.processed;
        } else {
          line = {{"error", r.error}, {"line", lines[i]}};
          ++summary.failed;
        }
      }
      out << line.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
    }
    texts.clear();
    parse_errors.clear();
    lines.clear();
  };

  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::optional<std::string> text;
    std::string error;
    try {
      const auto j = nlohmann::json::parse(raw);
      if (!j.is_object() || !j.contains("text") || !j["text"].is_string())
        error = Error(ErrorCode::MalformedJson, "expected {\"text\": string}", line_no).what();
      else
        text = j["text"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      error = Error(ErrorCode::MalformedJson, e.what(), line_no).what();
    }
    texts.push_back(std::move(text));
    parse_errors.push_back(std::move(error));
    lines.push_back(line_no);
    if (texts.size() == batch_size) flush();
  }
  if (!texts.empty()) flush();
  return summary;
}

inline FileSummary predict_file(const Tagger& tagger, const std::string& input_path,
                                const std::string& output_path,
                                const FileOptions& options = {}) {
  std::ifstream in(input_path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + input_path);
  std::ofstream out(output_path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + output_path);
  return predict_stream(tagger, in, out, options);
}

}  // namespace seqlab
