#pragma once

// Shared domain types. Data lives on three levels: tokens (model sub-units),
// words (whitespace or linguistic units) and entities (typed char spans).

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seqlab/error.hpp"
#include "seqlab/utf8.hpp"

namespace seqlab {

enum class Scheme { IO, BIO, BILOU };

enum class Prefix { B, I, L, O, U };

enum class Level { Token, Word };

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::IO: return "IO";
    case Scheme::BIO: return "BIO";
    case Scheme::BILOU: return "BILOU";
  }
  return "?";
}

inline std::optional<Scheme> scheme_from_string(std::string_view s) {
  if (s == "IO") return Scheme::IO;
  if (s == "BIO" || s == "IOB2") return Scheme::BIO;
  if (s == "BILOU") return Scheme::BILOU;
  return std::nullopt;
}

inline char prefix_char(Prefix p) {
  switch (p) {
    case Prefix::B: return 'B';
    case Prefix::I: return 'I';
    case Prefix::L: return 'L';
    case Prefix::O: return 'O';
    case Prefix::U: return 'U';
  }
  return '?';
}

inline std::optional<Prefix> prefix_from_char(char c) {
  switch (c) {
    case 'B': return Prefix::B;
    case 'I': return Prefix::I;
    case 'L': return Prefix::L;
    case 'O': return Prefix::O;
    case 'U': return Prefix::U;
    default: return std::nullopt;
  }
}

/// IO → {I, O}; BIO (IOB2) → {B, I, O}; BILOU → {B, I, L, O, U}.
constexpr bool scheme_allows(Scheme s, Prefix p) noexcept {
  switch (s) {
    case Scheme::IO: return p == Prefix::I || p == Prefix::O;
    case Scheme::BIO: return p == Prefix::B || p == Prefix::I || p == Prefix::O;
    case Scheme::BILOU: return true;
  }
  return false;
}

struct Label {
  Prefix prefix = Prefix::O;
  std::string class_name;

  static Label outside() { return {}; }
  static Label make(Prefix p, std::string cls) { return {p, std::move(cls)}; }

  bool is_outside() const noexcept { return prefix == Prefix::O; }

  std::string str() const {
    if (is_outside()) return "O";
    std::string out(1, prefix_char(prefix));
    out += '-';
    out += class_name;
    return out;
  }

  friend bool operator==(const Label&, const Label&) = default;
};

/// Splits on the first hyphen only, so class names may contain hyphens.
inline Label parse_label(std::string_view raw, Scheme scheme) {
  if (raw.empty()) throw Error(ErrorCode::MalformedLabel, "empty label");
  if (raw == "O") return Label::outside();
  const auto hyphen = raw.find('-');
  if (hyphen == std::string_view::npos)
    throw Error(ErrorCode::MalformedLabel,
                "missing hyphen in '" + std::string(raw) + "'");
  if (hyphen != 1)
    throw Error(ErrorCode::MalformedLabel,
                "prefix must be one letter in '" + std::string(raw) + "'");
  if (hyphen + 1 == raw.size())
    throw Error(ErrorCode::MalformedLabel,
                "empty class in '" + std::string(raw) + "'");
  const auto prefix = prefix_from_char(raw[0]);
  if (!prefix || *prefix == Prefix::O)
    throw Error(ErrorCode::MalformedLabel,
                "unknown prefix in '" + std::string(raw) + "'");
  if (!scheme_allows(scheme, *prefix))
    throw Error(ErrorCode::PrefixNotInScheme,
                "'" + std::string(raw) + "' under " +
                    std::string(to_string(scheme)));
  return Label{*prefix, std::string(raw.substr(hyphen + 1))};
}

inline std::vector<Label> parse_labels(std::span<const std::string> raw,
                                       Scheme scheme) {
  std::vector<Label> out;
  out.reserve(raw.size());
  for (const auto& r : raw) out.push_back(parse_label(r, scheme));
  return out;
}

inline std::vector<std::string> label_strings(std::span<const Label> labels) {
  std::vector<std::string> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(l.str());
  return out;
}

class LabelSequence {
 public:
  LabelSequence() = default;

  LabelSequence(std::vector<Label> labels, Level level, Scheme scheme)
      : labels_(std::move(labels)), level_(level), scheme_(scheme) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (!scheme_allows(scheme_, labels_[i].prefix))
        throw Error(ErrorCode::PrefixNotInScheme,
                    "'" + labels_[i].str() + "' at position " +
                        std::to_string(i) + " under " +
                        std::string(to_string(scheme_)));
      if (labels_[i].is_outside() != labels_[i].class_name.empty())
        throw Error(ErrorCode::MalformedLabel,
                    "class name must be empty iff prefix is O");
    }
  }

  static LabelSequence parse(std::span<const std::string> raw, Level level,
                             Scheme scheme) {
    return LabelSequence(parse_labels(raw, scheme), level, scheme);
  }

  const std::vector<Label>& labels() const noexcept { return labels_; }
  Level level() const noexcept { return level_; }
  Scheme scheme() const noexcept { return scheme_; }
  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  const Label& operator[](std::size_t i) const { return labels_[i]; }
  auto begin() const noexcept { return labels_.begin(); }
  auto end() const noexcept { return labels_.end(); }

  std::vector<std::string> strings() const { return label_strings(labels_); }

  friend bool operator==(const LabelSequence&, const LabelSequence&) = default;

 private:
  std::vector<Label> labels_;
  Level level_ = Level::Word;
  Scheme scheme_ = Scheme::BIO;
};

struct WordSpan {
  std::string surface;
  std::size_t char_start = 0;
  std::size_t char_end = 0;  // exclusive

  friend bool operator==(const WordSpan&, const WordSpan&) = default;
};

struct EntitySpan {
  std::string class_name;
  std::size_t char_start = 0;
  std::size_t char_end = 0;  // exclusive
  std::optional<std::size_t> word_start;
  std::optional<std::size_t> word_end;  // exclusive
  std::string surface;

  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

struct Document {
  std::string text;
  std::optional<std::vector<WordSpan>> words;
  std::optional<LabelSequence> word_labels;
  std::optional<std::vector<EntitySpan>> entities;

  friend bool operator==(const Document&, const Document&) = default;
};

/// Throws InvalidDocument when offsets, ordering or slices disagree with text.
inline void check_document(const Document& doc) {
  const utf8::IndexedText text(doc.text);
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::InvalidDocument, what);
  };
  if (doc.words) {
    std::size_t prev_end = 0;
    for (std::size_t i = 0; i < doc.words->size(); ++i) {
      const auto& w = (*doc.words)[i];
      if (w.char_start >= w.char_end || w.char_end > text.size())
        fail("word " + std::to_string(i) + " has invalid offsets");
      if (i > 0 && w.char_start < prev_end)
        fail("word " + std::to_string(i) + " overlaps its predecessor");
      if (text.slice(w.char_start, w.char_end) != w.surface)
        fail("word " + std::to_string(i) + " surface differs from text");
      prev_end = w.char_end;
    }
  }
  if (doc.word_labels) {
    if (!doc.words) fail("word labels without words");
    if (doc.word_labels->level() != Level::Word) fail("labels not word level");
    if (doc.word_labels->size() != doc.words->size())
      fail("word/label count mismatch");
  }
  if (doc.entities) {
    std::size_t prev_end = 0;
    for (std::size_t i = 0; i < doc.entities->size(); ++i) {
      const auto& e = (*doc.entities)[i];
      if (e.char_start >= e.char_end || e.char_end > text.size())
        fail("entity " + std::to_string(i) + " has invalid offsets");
      if (i > 0 && e.char_start < prev_end)
        fail("entity " + std::to_string(i) + " overlaps or is out of order");
      if (e.word_start && e.word_end && *e.word_start >= *e.word_end)
        fail("entity " + std::to_string(i) + " has invalid word range");
      if (text.slice(e.char_start, e.char_end) != e.surface)
        fail("entity " + std::to_string(i) + " surface differs from text");
      prev_end = e.char_end;
    }
  }
}

/// Ordered set of entity classes, never containing "O".
class TagSet {
 public:
  TagSet() = default;
  explicit TagSet(std::vector<std::string> classes) {
    for (auto& c : classes) add(std::move(c));
  }

  void add(std::string cls) {
    if (cls.empty() || cls == "O")
      throw Error(ErrorCode::InvalidConfig, "invalid class name '" + cls + "'");
    if (!contains(cls)) classes_.push_back(std::move(cls));
  }

  bool contains(std::string_view cls) const {
    return std::find(classes_.begin(), classes_.end(), cls) != classes_.end();
  }

  const std::vector<std::string>& classes() const noexcept { return classes_; }
  std::size_t size() const noexcept { return classes_.size(); }
  bool empty() const noexcept { return classes_.empty(); }

 private:
  std::vector<std::string> classes_;
};

// ---------------------------------------------------------------------------
// Scheme transition rules

enum class ViolationKind {
  DanglingInside,     // I/L with no open chunk
  ClassMismatch,      // I/L continuing an open chunk of another class
  UnterminatedChunk,  // BILOU chunk opened by B/I and never closed by L
};

inline std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::DanglingInside: return "DanglingInside";
    case ViolationKind::ClassMismatch: return "ClassMismatch";
    case ViolationKind::UnterminatedChunk: return "UnterminatedChunk";
  }
  return "?";
}

struct Violation {
  std::size_t position = 0;
  ViolationKind kind = ViolationKind::DanglingInside;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Checks each label against its predecessor. A BILOU chunk left open at the
/// end of the sequence is reported at position labels.size().
inline std::vector<Violation> validate_labels(std::span<const Label> labels,
                                              Scheme scheme) {
  std::vector<Violation> out;
  if (scheme == Scheme::IO) return out;
  const Label* prev = nullptr;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& cur = labels[i];
    if (scheme == Scheme::BIO) {
      if (cur.prefix == Prefix::I) {
        if (!prev || prev->is_outside())
          out.push_back({i, ViolationKind::DanglingInside});
        else if (prev->class_name != cur.class_name)
          out.push_back({i, ViolationKind::ClassMismatch});
      }
    } else {
      const bool open =
          prev && (prev->prefix == Prefix::B || prev->prefix == Prefix::I);
      const bool continues = cur.prefix == Prefix::I || cur.prefix == Prefix::L;
      if (open) {
        if (!continues)
          out.push_back({i, ViolationKind::UnterminatedChunk});
        else if (prev->class_name != cur.class_name)
          out.push_back({i, ViolationKind::ClassMismatch});
      } else if (continues) {
        out.push_back({i, ViolationKind::DanglingInside});
      }
    }
    prev = &cur;
  }
  if (scheme == Scheme::BILOU && prev &&
      (prev->prefix == Prefix::B || prev->prefix == Prefix::I))
    out.push_back({labels.size(), ViolationKind::UnterminatedChunk});
  return out;
}

inline std::vector<Violation> validate_sequence(const LabelSequence& seq) {
  return validate_labels(seq.labels(), seq.scheme());
}

}  // namespace seqlab
