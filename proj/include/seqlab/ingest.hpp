#pragma once

// Dataset ingestion: parsers for CoNLL columns, pretokenized JSONL, Doccano
// and LabelStudio exports and the canonical JSONL format; deterministic
// splitting, pruning, analysis and the end-to-end set_up.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "seqlab/builtin.hpp"
#include "seqlab/chunks.hpp"
#include "seqlab/core.hpp"
#include "seqlab/schemes.hpp"
#include "seqlab/utf8.hpp"

namespace seqlab {

enum class SplitName { Train, Val, Test };

inline constexpr std::array<SplitName, 3> kSplitNames{SplitName::Train, SplitName::Val,
                                                      SplitName::Test};

inline std::string_view to_string(SplitName s) {
  switch (s) {
    case SplitName::Train: return "train";
    case SplitName::Val: return "val";
    case SplitName::Test: return "test";
  }
  return "?";
}

inline std::optional<SplitName> split_from_string(std::string_view s) {
  if (s == "train") return SplitName::Train;
  if (s == "val" || s == "validation" || s == "dev") return SplitName::Val;
  if (s == "test") return SplitName::Test;
  return std::nullopt;
}

struct DatasetSplit {
  SplitName name = SplitName::Train;
  std::vector<Document> documents;
};

enum class SourceKind { LocalFile, HuggingFaceExport, AnnotationToolExport, BuiltIn };

inline std::string_view to_string(SourceKind k) {
  switch (k) {
    case SourceKind::LocalFile: return "LF";
    case SourceKind::HuggingFaceExport: return "HF";
    case SourceKind::AnnotationToolExport: return "AT";
    case SourceKind::BuiltIn: return "BI";
  }
  return "?";
}

inline std::optional<SourceKind> source_from_string(std::string_view s) {
  if (s == "LF") return SourceKind::LocalFile;
  if (s == "HF") return SourceKind::HuggingFaceExport;
  if (s == "AT") return SourceKind::AnnotationToolExport;
  if (s == "BI") return SourceKind::BuiltIn;
  return std::nullopt;
}

enum class ToolDialect { LabelStudioJson, DoccanoJsonl };

namespace detail {

/// Runs f(); any error escaping it is re-raised tagged with `line`.
template <typename F>
auto at_line(std::size_t line, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.line()) throw;
    throw e.at_line(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedJson, e.what(), line);
  }
}

inline std::string read_all(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

/// Raw (unparsed-scheme) labels of one document, with their source lines.
struct PendingLabels {
  std::vector<std::string> raw;
  std::vector<std::size_t> lines;
};

/// Assigns a scheme to every pending label sequence: `scheme` if given,
/// otherwise the one detected over the whole input (BIO when all O).
inline void finalize_labels(std::vector<Document>& docs,
                            const std::vector<std::optional<PendingLabels>>& pending,
                            std::optional<Scheme> scheme) {
  if (!scheme) {
    std::vector<std::vector<std::string>> all;
    for (const auto& p : pending)
      if (p) all.push_back(p->raw);
    try {
      scheme = detect_scheme(std::span<const std::vector<std::string>>(all));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AllOutside) throw;
      scheme = Scheme::BIO;
    }
  }
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (!pending[d]) continue;
    std::vector<Label> labels;
    labels.reserve(pending[d]->raw.size());
    for (std::size_t i = 0; i < pending[d]->raw.size(); ++i)
      labels.push_back(
          at_line(pending[d]->lines[i], [&] { return parse_label(pending[d]->raw[i], *scheme); }));
    docs[d].word_labels = LabelSequence(std::move(labels), Level::Word, *scheme);
  }
}

/// Words joined by single spaces; offsets count code points.
inline Document document_from_words(std::vector<std::string> surfaces) {
  Document doc;
  std::vector<WordSpan> words;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    if (i) {
      doc.text += ' ';
      ++pos;
    }
    const auto len = utf8::length(surfaces[i]);
    doc.text += surfaces[i];
    words.push_back({std::move(surfaces[i]), pos, pos + len});
    pos += len;
  }
  doc.words = std::move(words);
  return doc;
}

/// Locates each word in order inside `text`.
inline std::vector<WordSpan> locate_words(const utf8::IndexedText& text,
                                          std::span<const std::string> surfaces) {
  std::vector<WordSpan> out;
  const auto& cps = text.code_points();
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    const auto needle = utf8::decode(surfaces[i]);
    if (needle.empty())
      throw Error(ErrorCode::WordNotInText, "word " + std::to_string(i) + " is empty");
    const auto found = cps.find(needle, cursor);
    if (found == std::u32string::npos)
      throw Error(ErrorCode::WordNotInText,
                  "word " + std::to_string(i) + " '" + surfaces[i] + "' not found in text");
    out.push_back({surfaces[i], found, found + needle.size()});
    cursor = found + needle.size();
  }
  return out;
}

struct RawSpan {
  std::int64_t start = 0;
  std::int64_t end = 0;
  std::string label;
};

/// Validates char spans against `text`, sorts them, and rejects overlaps.
inline std::vector<EntitySpan> make_entities(const utf8::IndexedText& text,
                                             std::vector<RawSpan> spans) {
  const auto len = static_cast<std::int64_t>(text.size());
  for (const auto& s : spans) {
    if (s.start < 0 || s.end > len || s.start >= s.end)
      throw Error(ErrorCode::SpanOutOfBounds,
                  "span [" + std::to_string(s.start) + ", " + std::to_string(s.end) +
                      ") outside text of length " + std::to_string(len));
    if (s.label.empty() || s.label == "O")
      throw Error(ErrorCode::MalformedLabel, "invalid span class '" + s.label + "'");
  }
  std::stable_sort(spans.begin(), spans.end(), [](const RawSpan& a, const RawSpan& b) {
    return a.start != b.start ? a.start < b.start : a.end < b.end;
  });
  std::vector<EntitySpan> out;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (i > 0 && spans[i].start < spans[i - 1].end)
      throw Error(ErrorCode::OverlappingSpans,
                  "spans [" + std::to_string(spans[i - 1].start) + ", " +
                      std::to_string(spans[i - 1].end) + ") and [" +
                      std::to_string(spans[i].start) + ", " + std::to_string(spans[i].end) +
                      ") overlap");
    EntitySpan e;
    e.class_name = spans[i].label;
    e.char_start = static_cast<std::size_t>(spans[i].start);
    e.char_end = static_cast<std::size_t>(spans[i].end);
    e.surface = text.slice(e.char_start, e.char_end);
    out.push_back(std::move(e));
  }
  return out;
}

inline std::int64_t get_offset(const nlohmann::json& j) {
  if (!j.is_number_integer()) throw Error(ErrorCode::MalformedJson, "offset is not an integer");
  return j.get<std::int64_t>();
}

inline std::vector<std::string> get_string_array(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorCode::MalformedJson, std::string(what) + " is not an array");
  std::vector<std::string> out;
  for (const auto& item : j) {
    if (!item.is_string())
      throw Error(ErrorCode::MalformedJson, std::string(what) + " must hold strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

/// 1-based line of every top-level element of a JSON array document.
inline std::vector<std::size_t> top_level_element_lines(std::string_view text) {
  std::vector<std::size_t> lines;
  std::size_t line = 1;
  int depth = 0;
  bool in_string = false, escape = false, expecting = false;
  for (char c : text) {
    if (c == '\n') ++line;
    if (in_string) {
      if (escape) escape = false;
      else if (c == '\\') escape = true;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    if (depth == 1 && expecting && c != ']') {
      lines.push_back(line);
      expecting = false;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '[' || c == '{') {
      ++depth;
      if (depth == 1) expecting = true;
    } else if (c == ']' || c == '}') {
      --depth;
    } else if (c == ',' && depth == 1) {
      expecting = true;
    }
  }
  return lines;
}

inline std::size_t line_of_byte(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// CoNLL

/// Whitespace columns, word first and label last; blank lines end sentences
/// and -DOCSTART- rows are skipped. Words get offsets of a single-space join.
inline std::vector<Document> parse_conll(std::istream& in,
                                         std::optional<Scheme> scheme = std::nullopt) {
  std::vector<Document> docs;
  std::vector<std::optional<detail::PendingLabels>> pending;
  std::vector<std::string> surfaces;
  detail::PendingLabels labels;

  auto close = [&] {
    if (surfaces.empty()) return;
    docs.push_back(detail::document_from_words(std::move(surfaces)));
    pending.push_back(std::move(labels));
    surfaces.clear();
    labels = {};
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    std::istringstream cols(line);
    std::vector<std::string> fields;
    for (std::string f; cols >> f;) fields.push_back(std::move(f));
    if (fields.empty()) {
      close();
      continue;
    }
    if (fields.front() == "-DOCSTART-") continue;
    if (fields.size() < 2)
      throw Error(ErrorCode::RaggedRow, "expected at least 2 columns", line_no);
    detail::at_line(line_no, [&] {
      utf8::length(fields.front());
      parse_label(fields.back(), Scheme::BILOU);
    });
    surfaces.push_back(fields.front());
    labels.raw.push_back(fields.back());
    labels.lines.push_back(line_no);
  }
  close();
  if (docs.empty()) throw Error(ErrorCode::EmptyInput, "no sentences in CoNLL input");
  detail::finalize_labels(docs, pending, scheme);
  return docs;
}

inline std::vector<Document> parse_conll(std::string_view text,
                                         std::optional<Scheme> scheme = std::nullopt) {
  std::istringstream in{std::string(text)};
  return parse_conll(in, scheme);
}

/// Documents must carry words and word labels.
inline void write_conll(std::ostream& out, std::span<const Document> docs) {
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const auto& doc = docs[d];
    if (!doc.words || !doc.word_labels)
      throw Error(ErrorCode::InvalidDocument,
                  "document " + std::to_string(d) + " has no word labels");
    if (d) out << '\n';
    for (std::size_t i = 0; i < doc.words->size(); ++i)
      out << (*doc.words)[i].surface << ' ' << (*doc.word_labels)[i].str() << '\n';
  }
}

// ---------------------------------------------------------------------------
// JSONL formats

namespace detail {

template <typename PerLine>
void for_each_jsonl(std::istream& in, PerLine&& per_line) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    at_line(line_no, [&] {
      const auto j = nlohmann::json::parse(line);
      if (!j.is_object()) throw Error(ErrorCode::MalformedJson, "expected a JSON object");
      per_line(j, line_no);
    });
  }
}

}  // namespace detail

/// {"words": [...], "labels": [...], "text"?: ...} per line.
inline std::vector<Document> parse_pretokenized_jsonl(std::istream& in,
                                                      std::optional<Scheme> scheme = std::nullopt) {
  std::vector<Document> docs;
  std::vector<std::optional<detail::PendingLabels>> pending;
  detail::for_each_jsonl(in, [&](const nlohmann::json& j, std::size_t line_no) {
    if (!j.contains("words") || !j.contains("labels"))
      throw Error(ErrorCode::MalformedJson, "missing \"words\" or \"labels\"");
    auto words = detail::get_string_array(j.at("words"), "words");
    auto labels = detail::get_string_array(j.at("labels"), "labels");
    if (words.size() != labels.size())
      throw Error(ErrorCode::LengthMismatch, std::to_string(words.size()) + " words vs " +
                                                 std::to_string(labels.size()) + " labels");
    for (const auto& l : labels) parse_label(l, Scheme::BILOU);
    Document doc;
    if (j.contains("text") && !j.at("text").is_null()) {
      if (!j.at("text").is_string()) throw Error(ErrorCode::MalformedJson, "text is not a string");
      doc.text = j.at("text").get<std::string>();
      doc.words = detail::locate_words(utf8::IndexedText(doc.text), words);
    } else {
      doc = detail::document_from_words(std::move(words));
    }
    detail::PendingLabels p;
    p.raw = std::move(labels);
    p.lines.assign(p.raw.size(), line_no);
    docs.push_back(std::move(doc));
    pending.push_back(std::move(p));
  });
  detail::finalize_labels(docs, pending, scheme);
  return docs;
}

inline nlohmann::json document_to_json(const Document& doc) {
  nlohmann::json j;
  j["text"] = doc.text;
  if (doc.words) {
    j["words"] = nlohmann::json::array();
    for (const auto& w : *doc.words)
      j["words"].push_back({{"surface", w.surface}, {"start", w.char_start}, {"end", w.char_end}});
  } else {
    j["words"] = nullptr;
  }
  j["labels"] = doc.word_labels ? nlohmann::json(doc.word_labels->strings()) : nlohmann::json();
  if (doc.entities) {
    j["entities"] = nlohmann::json::array();
    for (const auto& e : *doc.entities)
      j["entities"].push_back(
          {{"start", e.char_start}, {"end", e.char_end}, {"label", e.class_name}});
  } else {
    j["entities"] = nullptr;
  }
  return j;
}

/// The canonical format: text, words [{surface,start,end}] | null,
/// labels [string] | null, entities [{start,end,label}] | null.
inline std::vector<Document> parse_canonical_jsonl(std::istream& in,
                                                   std::optional<Scheme> scheme = std::nullopt) {
  std::vector<Document> docs;
  std::vector<std::optional<detail::PendingLabels>> pending;
  detail::for_each_jsonl(in, [&](const nlohmann::json& j, std::size_t line_no) {
    if (!j.contains("text") || !j.at("text").is_string())
      throw Error(ErrorCode::MalformedJson, "missing string \"text\"");
    Document doc;
    doc.text = j.at("text").get<std::string>();
    const utf8::IndexedText text(doc.text);
    if (j.contains("words") && !j.at("words").is_null()) {
      const auto& arr = j.at("words");
      if (!arr.is_array()) throw Error(ErrorCode::MalformedJson, "words is not an array");
      std::vector<WordSpan> words;
      for (const auto& w : arr) {
        if (!w.is_object() || !w.contains("surface") || !w.at("surface").is_string())
          throw Error(ErrorCode::MalformedJson, "word must be {surface,start,end}");
        const auto start = detail::get_offset(w.at("start"));
        const auto end = detail::get_offset(w.at("end"));
        if (start < 0 || end < 0)
          throw Error(ErrorCode::SpanOutOfBounds, "negative word offset");
        words.push_back({w.at("surface").get<std::string>(), static_cast<std::size_t>(start),
                         static_cast<std::size_t>(end)});
      }
      doc.words = std::move(words);
    }
    std::optional<detail::PendingLabels> p;
    if (j.contains("labels") && !j.at("labels").is_null()) {
      detail::PendingLabels pl;
      pl.raw = detail::get_string_array(j.at("labels"), "labels");
      for (const auto& l : pl.raw) parse_label(l, Scheme::BILOU);
      if (!doc.words || doc.words->size() != pl.raw.size())
        throw Error(ErrorCode::LengthMismatch, "labels do not match words");
      pl.lines.assign(pl.raw.size(), line_no);
      p = std::move(pl);
    }
    if (j.contains("entities") && !j.at("entities").is_null()) {
      const auto& arr = j.at("entities");
      if (!arr.is_array()) throw Error(ErrorCode::MalformedJson, "entities is not an array");
      std::vector<detail::RawSpan> spans;
      for (const auto& e : arr) {
        if (!e.is_object() || !e.contains("label") || !e.at("label").is_string())
          throw Error(ErrorCode::MalformedJson, "entity must be {start,end,label}");
        spans.push_back({detail::get_offset(e.at("start")), detail::get_offset(e.at("end")),
                         e.at("label").get<std::string>()});
      }
      doc.entities = detail::make_entities(text, std::move(spans));
    }
    Document probe = doc;
    probe.word_labels.reset();
    check_document(probe);
    docs.push_back(std::move(doc));
    pending.push_back(std::move(p));
  });
  detail::finalize_labels(docs, pending, scheme);
  return docs;
}

inline void write_canonical_jsonl(std::ostream& out, std::span<const Document> docs) {
  for (const auto& d : docs) out << document_to_json(d).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Annotation tool exports

/// Doccano: {"text": ..., "label": [[start, end, class], ...]} per line
/// ("labels" is accepted as an alias).
inline std::vector<Document> parse_doccano_jsonl(std::istream& in) {
  std::vector<Document> docs;
  detail::for_each_jsonl(in, [&](const nlohmann::json& j, std::size_t) {
    if (!j.contains("text") || !j.at("text").is_string())
      throw Error(ErrorCode::MalformedJson, "missing string \"text\"");
    Document doc;
    doc.text = j.at("text").get<std::string>();
    const utf8::IndexedText text(doc.text);
    std::vector<detail::RawSpan> spans;
    const char* key = j.contains("label") ? "label" : j.contains("labels") ? "labels" : nullptr;
    if (key && !j.at(key).is_null()) {
      const auto& arr = j.at(key);
      if (!arr.is_array()) throw Error(ErrorCode::MalformedJson, "label is not an array");
      for (const auto& s : arr) {
        if (!s.is_array() || s.size() != 3 || !s[2].is_string())
          throw Error(ErrorCode::MalformedJson, "label entry must be [start, end, class]");
        spans.push_back({detail::get_offset(s[0]), detail::get_offset(s[1]),
                         s[2].get<std::string>()});
      }
    }
    doc.entities = detail::make_entities(text, std::move(spans));
    docs.push_back(std::move(doc));
  });
  return docs;
}

/// LabelStudio: a JSON array of tasks; spans come from the first annotation's
/// results of type "labels" (value.start, value.end, value.labels[0]).
/// Errors name the line on which the offending task starts.
inline std::vector<Document> parse_labelstudio_json(std::istream& in) {
  const auto raw = detail::read_all(in);
  nlohmann::json tasks;
  try {
    tasks = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedJson, e.what(), detail::line_of_byte(raw, e.byte));
  }
  if (!tasks.is_array()) throw Error(ErrorCode::MalformedJson, "expected an array of tasks", 1);
  const auto lines = detail::top_level_element_lines(raw);
  std::vector<Document> docs;
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    const auto line = k < lines.size() ? lines[k] : 1;
    detail::at_line(line, [&] {
      const auto& task = tasks[k];
      if (!task.is_object() || !task.contains("data") || !task.at("data").is_object())
        throw Error(ErrorCode::MalformedJson, "task " + std::to_string(k) + " has no data");
      const auto& data = task.at("data");
      const nlohmann::json* text_node = nullptr;
      if (data.contains("text") && data.at("text").is_string()) {
        text_node = &data.at("text");
      } else {
        for (const auto& [key, v] : data.items())
          if (v.is_string()) {
            text_node = &v;
            break;
          }
      }
      if (!text_node) throw Error(ErrorCode::MalformedJson, "task " + std::to_string(k) + " has no text");
      Document doc;
      doc.text = text_node->get<std::string>();
      const utf8::IndexedText text(doc.text);
      std::vector<detail::RawSpan> spans;
      if (task.contains("annotations") && task.at("annotations").is_array() &&
          !task.at("annotations").empty()) {
        const auto& ann = task.at("annotations")[0];
        if (!ann.is_object()) throw Error(ErrorCode::MalformedJson, "annotation is not an object");
        const auto results = ann.value("result", nlohmann::json::array());
        if (!results.is_array()) throw Error(ErrorCode::MalformedJson, "result is not an array");
        for (const auto& r : results) {
          if (!r.is_object() || r.value("type", std::string()) != "labels") continue;
          const auto& v = r.at("value");
          const auto& ls = v.at("labels");
          if (!ls.is_array() || ls.empty() || !ls[0].is_string())
            throw Error(ErrorCode::MalformedJson, "result without labels");
          spans.push_back({detail::get_offset(v.at("start")), detail::get_offset(v.at("end")),
                           ls[0].get<std::string>()});
        }
      }
      doc.entities = detail::make_entities(text, std::move(spans));
      docs.push_back(std::move(doc));
    });
  }
  return docs;
}

inline std::vector<Document> parse_annotation_tool_export(std::istream& in, ToolDialect dialect) {
  return dialect == ToolDialect::LabelStudioJson ? parse_labelstudio_json(in)
                                                 : parse_doccano_jsonl(in);
}

// ---------------------------------------------------------------------------
// File dispatch

enum class FileFormat { Conll, PretokenizedJsonl, CanonicalJsonl, DoccanoJsonl, LabelStudioJson };

/// Picks the JSONL flavour from the first non-blank line.
inline FileFormat sniff_jsonl(std::istream& in) {
  std::string line;
  const auto pos = in.tellg();
  FileFormat f = FileFormat::CanonicalJsonl;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_object()) {
      if (j.contains("words")) {
        const auto& w = j["words"];
        f = (w.is_array() && !w.empty() && w[0].is_string()) ? FileFormat::PretokenizedJsonl
                                                             : FileFormat::CanonicalJsonl;
        if (w.is_array() && w.empty() && !j.contains("entities"))
          f = FileFormat::PretokenizedJsonl;
      } else if (j.contains("label") ||
                 (j.contains("labels") && !j.contains("entities"))) {
        f = FileFormat::DoccanoJsonl;
      }
    }
    break;
  }
  in.clear();
  in.seekg(pos);
  return f;
}

inline std::vector<Document> read_dataset_stream(std::istream& in, FileFormat format,
                                                 std::optional<Scheme> scheme = std::nullopt) {
  switch (format) {
    case FileFormat::Conll: return parse_conll(in, scheme);
    case FileFormat::PretokenizedJsonl: return parse_pretokenized_jsonl(in, scheme);
    case FileFormat::CanonicalJsonl: return parse_canonical_jsonl(in, scheme);
    case FileFormat::DoccanoJsonl: return parse_doccano_jsonl(in);
    case FileFormat::LabelStudioJson: return parse_labelstudio_json(in);
  }
  return {};
}

inline FileFormat format_for(const std::filesystem::path& path, std::istream& in) {
  const auto ext = path.extension().string();
  if (ext == ".conll" || ext == ".txt") return FileFormat::Conll;
  if (ext == ".json") return FileFormat::LabelStudioJson;
  if (ext == ".jsonl") return sniff_jsonl(in);
  throw Error(ErrorCode::UnresolvableSource, "unsupported file type " + path.string());
}

inline std::vector<Document> read_dataset_file(const std::filesystem::path& path,
                                               std::optional<Scheme> scheme = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::UnresolvableSource, "cannot open " + path.string());
  const auto format = format_for(path, in);
  try {
    return read_dataset_stream(in, format, scheme);
  } catch (const Error& e) {
    throw Error(e.code(), path.filename().string() + ": " + e.detail(), e.line());
  }
}

// ---------------------------------------------------------------------------
// Splitting, pruning, analysis

namespace detail {

/// Unbiased draw in [0, bound) by rejection; independent of the standard
/// library's distribution implementations so splits are portable.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace detail

template <typename T>
void seeded_shuffle(std::vector<T>& items, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = items.size(); i > 1; --i)
    std::swap(items[i - 1], items[detail::bounded(rng, i)]);
}

/// train = ⌊r_train·n⌋, val = ⌊r_val·n⌋, test = remainder.
inline std::array<std::size_t, 3> split_sizes(std::size_t n, const std::array<double, 3>& ratio) {
  for (double r : ratio)
    if (!(r >= 0.0) || r > 1.0) throw Error(ErrorCode::InvalidConfig, "split ratio outside [0,1]");
  if (ratio[0] + ratio[1] + ratio[2] > 1.0 + 1e-9)
    throw Error(ErrorCode::InvalidConfig, "split ratios sum above 1");
  const auto nd = static_cast<double>(n);
  const auto train = static_cast<std::size_t>(std::floor(ratio[0] * nd + 1e-9));
  const auto val = std::min(n - train, static_cast<std::size_t>(std::floor(ratio[1] * nd + 1e-9)));
  return {train, val, n - train - val};
}

inline std::array<DatasetSplit, 3> split_documents(std::vector<Document> docs,
                                                   const std::array<double, 3>& ratio,
                                                   std::uint64_t seed) {
  const auto sizes = split_sizes(docs.size(), ratio);
  seeded_shuffle(docs, seed);
  std::array<DatasetSplit, 3> out;
  std::size_t pos = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    out[s].name = kSplitNames[s];
    for (std::size_t k = 0; k < sizes[s]; ++k) out[s].documents.push_back(std::move(docs[pos++]));
  }
  return out;
}

/// First ⌈fraction·n⌉ documents.
inline DatasetSplit prune(const DatasetSplit& split, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw Error(ErrorCode::FractionOutOfRange, "fraction must be in (0, 1]");
  const auto n = split.documents.size();
  const auto keep = std::min(
      n, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9)));
  DatasetSplit out;
  out.name = split.name;
  out.documents.assign(split.documents.begin(),
                       split.documents.begin() + static_cast<std::ptrdiff_t>(keep));
  return out;
}

struct SplitStats {
  std::size_t documents = 0;
  std::size_t words = 0;
  std::map<std::string, std::size_t> entity_counts;
  std::size_t io_merges = 0;  // adjacent same-class chunk pairs lost under IO
};

struct DatasetAnalysis {
  std::array<SplitStats, 3> splits;
  std::optional<Scheme> scheme_detected;
  bool pretokenized = false;
  bool presplit = false;
  std::uint64_t seed = 0;
  std::array<double, 3> split_ratio{0.8, 0.1, 0.1};
  std::string name;
  std::optional<SourceKind> source;

  const SplitStats& operator[](SplitName s) const { return splits[static_cast<std::size_t>(s)]; }
};

inline DatasetAnalysis analyze(std::span<const DatasetSplit> splits) {
  DatasetAnalysis a;
  std::vector<LabelSequence> sequences;
  bool all_words = true, any_doc = false;
  for (const auto& split : splits) {
    auto& st = a.splits[static_cast<std::size_t>(split.name)];
    st.documents = split.documents.size();
    for (const auto& doc : split.documents) {
      any_doc = true;
      all_words &= doc.words.has_value();
      st.words += doc.words ? doc.words->size() : split_words(doc.text).size();
      std::vector<Chunk> chunks;
      if (doc.word_labels) {
        sequences.push_back(*doc.word_labels);
        chunks = extract_entities(*doc.word_labels, ExtractionMode::Strict);
        for (const auto& c : chunks) ++st.entity_counts[c.class_name];
        st.io_merges += count_io_merges(chunks);
      } else if (doc.entities) {
        for (const auto& e : *doc.entities) ++st.entity_counts[e.class_name];
        for (std::size_t i = 1; i < doc.entities->size(); ++i) {
          const auto& p = (*doc.entities)[i - 1];
          const auto& e = (*doc.entities)[i];
          // adjacent means only whitespace between them
          if (p.class_name == e.class_name) {
            const utf8::IndexedText text(doc.text);
            bool gap_is_space = true;
            for (auto k = p.char_end; k < e.char_start; ++k)
              gap_is_space &= utf8::is_space(text.code_points()[k]);
            st.io_merges += gap_is_space;
          }
        }
      }
    }
  }
  a.pretokenized = any_doc && all_words;
  if (!sequences.empty()) {
    try {
      a.scheme_detected = detect_scheme(std::span<const LabelSequence>(sequences));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AllOutside) throw;
    }
  }
  return a;
}

inline nlohmann::json to_json(const DatasetAnalysis& a) {
  nlohmann::json j;
  for (std::size_t s = 0; s < 3; ++s) {
    const auto key = std::string(to_string(kSplitNames[s]));
    const auto& st = a.splits[s];
    j["num_documents"][key] = st.documents;
    j["num_words"][key] = st.words;
    j["entity_counts"][key] = nlohmann::json::object();
    for (const auto& [cls, n] : st.entity_counts) j["entity_counts"][key][cls] = n;
    j["io_merges"][key] = st.io_merges;
  }
  j["scheme_detected"] =
      a.scheme_detected ? nlohmann::json(to_string(*a.scheme_detected)) : nlohmann::json();
  j["pretokenized"] = a.pretokenized;
  j["presplit"] = a.presplit;
  j["seed"] = a.seed;
  j["split_ratio"] = a.split_ratio;
  j["name"] = a.name;
  j["source"] = a.source ? nlohmann::json(to_string(*a.source)) : nlohmann::json();
  return j;
}

// ---------------------------------------------------------------------------
// set_up

struct SetUpParams {
  SourceKind source = SourceKind::BuiltIn;
  std::string name;                  // dataset name; the registry key for BuiltIn
  std::filesystem::path path;        // file or directory for LF/HF/AT
  std::array<double, 3> split_ratio{0.8, 0.1, 0.1};
  std::uint64_t seed = 42;
  std::array<double, 3> fractions{1.0, 1.0, 1.0};
  std::optional<Scheme> scheme;      // detected over all splits when absent
  std::optional<std::filesystem::path> output_dir;
};

struct SetUpResult {
  std::array<DatasetSplit, 3> splits;
  DatasetAnalysis analysis;
};

namespace detail {

inline bool extension_allowed(SourceKind source, const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  switch (source) {
    case SourceKind::LocalFile:
      return ext == ".conll" || ext == ".txt" || ext == ".jsonl" || ext == ".json";
    case SourceKind::HuggingFaceExport: return ext == ".jsonl";
    case SourceKind::AnnotationToolExport: return ext == ".jsonl" || ext == ".json";
    case SourceKind::BuiltIn: return false;
  }
  return false;
}

/// Re-labels every sequence under one scheme covering all splits.
inline void unify_scheme(std::array<DatasetSplit, 3>& splits, std::optional<Scheme> scheme) {
  std::vector<std::vector<std::string>> raw;
  for (const auto& s : splits)
    for (const auto& d : s.documents)
      if (d.word_labels) raw.push_back(d.word_labels->strings());
  if (raw.empty()) return;
  Scheme target = Scheme::BIO;
  if (scheme) {
    target = *scheme;
  } else {
    try {
      target = detect_scheme(std::span<const std::vector<std::string>>(raw));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AllOutside) throw;
    }
  }
  for (auto& s : splits)
    for (auto& d : s.documents)
      if (d.word_labels)
        d.word_labels = LabelSequence(d.word_labels->labels(), Level::Word, target);
}

}  // namespace detail

inline void write_split_files(const std::filesystem::path& dir,
                              const std::array<DatasetSplit, 3>& splits,
                              const DatasetAnalysis& analysis) {
  std::filesystem::create_directories(dir);
  for (const auto& s : splits) {
    std::ofstream out(dir / (std::string(to_string(s.name)) + ".jsonl"), std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write into " + dir.string());
    write_canonical_jsonl(out, s.documents);
  }
  std::ofstream out(dir / "analysis.json");
  if (!out) throw Error(ErrorCode::Io, "cannot write analysis.json");
  out << to_json(analysis).dump(2) << '\n';
}

/// Resolves the source, parses it into canonical documents, splits unsplit
/// data deterministically, prunes, analyzes and (optionally) writes
/// {train,val,test}.jsonl and analysis.json to params.output_dir.
inline SetUpResult set_up(const SetUpParams& params) {
  namespace fs = std::filesystem;
  SetUpResult result;
  for (std::size_t s = 0; s < 3; ++s) result.splits[s].name = kSplitNames[s];
  bool presplit = false;

  if (params.source == SourceKind::BuiltIn) {
    const auto* builtin = builtin::find(params.name);
    if (!builtin)
      throw Error(ErrorCode::UnresolvableSource, "no built-in dataset '" + params.name + "'");
    const std::array<std::string_view, 3> texts{builtin->train, builtin->val, builtin->test};
    for (std::size_t s = 0; s < 3; ++s)
      result.splits[s].documents = parse_conll(texts[s], params.scheme);
    presplit = true;
  } else {
    const auto& path = params.path;
    if (path.empty() || !fs::exists(path))
      throw Error(ErrorCode::UnresolvableSource, "path '" + path.string() + "' does not exist");
    std::optional<fs::path> single;
    if (fs::is_directory(path)) {
      std::array<std::optional<fs::path>, 3> found;
      std::vector<fs::path> candidates;
      for (const auto& entry : fs::directory_iterator(path)) {
        if (!entry.is_regular_file() || !detail::extension_allowed(params.source, entry.path()))
          continue;
        candidates.push_back(entry.path());
        if (auto split = split_from_string(entry.path().stem().string())) {
          auto& slot = found[static_cast<std::size_t>(*split)];
          if (slot)
            throw Error(ErrorCode::UnresolvableSource,
                        "several files for split " + std::string(to_string(*split)));
          slot = entry.path();
        }
      }
      presplit = found[0] || found[1] || found[2];
      if (presplit) {
        for (std::size_t s = 0; s < 3; ++s)
          if (found[s]) result.splits[s].documents = read_dataset_file(*found[s], params.scheme);
      } else if (candidates.size() == 1) {
        single = candidates.front();
      } else {
        throw Error(ErrorCode::UnresolvableSource,
                    "expected train/val/test files or a single data file in " + path.string());
      }
    } else {
      if (!detail::extension_allowed(params.source, path))
        throw Error(ErrorCode::UnresolvableSource,
                    "file type not accepted for source " +
                        std::string(to_string(params.source)) + ": " + path.string());
      single = path;
    }
    if (single) {
      result.splits = split_documents(read_dataset_file(*single, params.scheme),
                                      params.split_ratio, params.seed);
    }
  }

  detail::unify_scheme(result.splits, params.scheme);
  for (std::size_t s = 0; s < 3; ++s)
    if (params.fractions[s] != 1.0) result.splits[s] = prune(result.splits[s], params.fractions[s]);

  result.analysis = analyze(result.splits);
  result.analysis.presplit = presplit;
  result.analysis.seed = params.seed;
  result.analysis.split_ratio = params.split_ratio;
  result.analysis.name = params.name;
  result.analysis.source = params.source;
  if (params.output_dir) write_split_files(*params.output_dir, result.splits, result.analysis);
  return result;
}

/// Reads one canonical split file written by set_up.
inline std::vector<Document> load_split(const std::filesystem::path& dataset_dir, SplitName split,
                                        std::optional<Scheme> scheme = std::nullopt) {
  const auto file = dataset_dir / (std::string(to_string(split)) + ".jsonl");
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::UnresolvableSource, "cannot open " + file.string());
  return parse_canonical_jsonl(in, scheme);
}

}  // namespace seqlab
