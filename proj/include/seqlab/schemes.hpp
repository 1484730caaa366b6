#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqlab/chunks.hpp"
#include "seqlab/core.hpp"
#include "seqlab/utf8.hpp"

namespace seqlab {

// ---------------------------------------------------------------------------
// Detection and translation

/// BILOU if any L/U prefix occurs, else BIO if any B occurs, else IO.
inline Scheme detect_scheme(std::span<const std::vector<std::string>> sequences) {
  bool any_entity = false, any_b = false, any_lu = false;
  for (const auto& seq : sequences) {
    for (const auto& raw : seq) {
      const auto label = parse_label(raw, Scheme::BILOU);
      if (label.is_outside()) continue;
      any_entity = true;
      any_b |= label.prefix == Prefix::B;
      any_lu |= label.prefix == Prefix::L || label.prefix == Prefix::U;
    }
  }
  if (!any_entity)
    throw Error(ErrorCode::AllOutside, "only O labels; scheme is undecidable");
  if (any_lu) return Scheme::BILOU;
  return any_b ? Scheme::BIO : Scheme::IO;
}

inline Scheme detect_scheme(std::span<const LabelSequence> sequences) {
  std::vector<std::vector<std::string>> raw;
  raw.reserve(sequences.size());
  for (const auto& s : sequences) raw.push_back(s.strings());
  return detect_scheme(std::span<const std::vector<std::string>>(raw));
}

/// Number of chunk pairs that touch and share a class. Translating to IO
/// merges each such pair into one chunk.
inline std::size_t count_io_merges(std::span<const Chunk> chunks) {
  std::size_t n = 0;
  for (std::size_t i = 1; i < chunks.size(); ++i)
    if (chunks[i - 1].word_end == chunks[i].word_start &&
        chunks[i - 1].class_name == chunks[i].class_name)
      ++n;
  return n;
}

/// Chunk-preserving translation. Under an IO target, adjacent chunks of the
/// same class become one chunk.
inline LabelSequence convert_scheme(const LabelSequence& seq, Scheme target) {
  const auto violations = validate_sequence(seq);
  if (!violations.empty())
    throw Error(ErrorCode::InconsistentSource,
                std::to_string(violations.size()) + " violation(s), first " +
                    std::string(to_string(violations.front().kind)) +
                    " at position " +
                    std::to_string(violations.front().position));
  const auto chunks = extract_entities(seq, ExtractionMode::Strict);
  return LabelSequence(emit_labels(chunks, seq.size(), target), seq.level(),
                       target);
}

// ---------------------------------------------------------------------------
// Entity level <-> word level

inline LabelSequence entities_to_word_labels(const Document& doc, Scheme scheme) {
  if (!doc.words)
    throw Error(ErrorCode::InvalidDocument, "document has no words");
  const auto& words = *doc.words;
  std::vector<Chunk> chunks;
  if (doc.entities) {
    std::size_t w = 0;
    for (const auto& e : *doc.entities) {
      while (w < words.size() && words[w].char_end <= e.char_start) ++w;
      const auto start = w;
      if (start == words.size() || words[start].char_start != e.char_start)
        throw Error(ErrorCode::MisalignedEntity,
                    "entity start " + std::to_string(e.char_start) +
                        " is not a word start");
      while (w < words.size() && words[w].char_end < e.char_end) ++w;
      if (w == words.size() || words[w].char_end != e.char_end)
        throw Error(ErrorCode::MisalignedEntity,
                    "entity end " + std::to_string(e.char_end) +
                        " is not a word end");
      chunks.push_back({e.class_name, start, w + 1});
      ++w;
    }
  }
  return LabelSequence(emit_labels(chunks, words.size(), scheme), Level::Word,
                       scheme);
}

/// Strict chunks of `labels` as char-level spans over `text`.
inline std::vector<EntitySpan> chunks_to_entities(const utf8::IndexedText& text,
                                                  std::span<const WordSpan> words,
                                                  std::span<const Chunk> chunks) {
  std::vector<EntitySpan> out;
  out.reserve(chunks.size());
  for (const auto& c : chunks) {
    EntitySpan e;
    e.class_name = c.class_name;
    e.char_start = words[c.word_start].char_start;
    e.char_end = words[c.word_end - 1].char_end;
    e.word_start = c.word_start;
    e.word_end = c.word_end;
    e.surface = text.slice(e.char_start, e.char_end);
    out.push_back(std::move(e));
  }
  return out;
}

inline std::vector<EntitySpan> word_labels_to_entities(const Document& doc) {
  if (!doc.words || !doc.word_labels)
    throw Error(ErrorCode::InvalidDocument, "document has no word labels");
  const utf8::IndexedText text(doc.text);
  const auto chunks = extract_entities(*doc.word_labels, ExtractionMode::Strict);
  return chunks_to_entities(text, *doc.words, chunks);
}

/// Whitespace word splitting with code point offsets.
inline std::vector<WordSpan> split_words(const utf8::IndexedText& text) {
  std::vector<WordSpan> out;
  const auto& cps = text.code_points();
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && utf8::is_space(cps[i])) ++i;
    if (i == cps.size()) break;
    const auto start = i;
    while (i < cps.size() && !utf8::is_space(cps[i])) ++i;
    out.push_back({text.slice(start, i), start, i});
  }
  return out;
}

inline std::vector<WordSpan> split_words(std::string_view text) {
  return split_words(utf8::IndexedText(text));
}

/// Words of a document (split on whitespace when not pretokenized) and its
/// gold labels in `scheme`, derived from word labels or entity spans.
struct WordLevelView {
  std::vector<WordSpan> words;
  std::optional<LabelSequence> labels;
};

inline WordLevelView word_level_view(const Document& doc, Scheme scheme) {
  WordLevelView view;
  view.words = doc.words ? *doc.words : split_words(doc.text);
  if (doc.word_labels) {
    view.labels = doc.word_labels->scheme() == scheme
                      ? *doc.word_labels
                      : convert_scheme(*doc.word_labels, scheme);
  } else if (doc.entities) {
    Document with_words = doc;
    with_words.words = view.words;
    view.labels = entities_to_word_labels(with_words, scheme);
  }
  return view;
}

// ---------------------------------------------------------------------------
// Word level <-> token level

struct TokenPosition {
  std::size_t word_index = 0;
  bool is_first_of_word = true;

  friend bool operator==(const TokenPosition&, const TokenPosition&) = default;
};

/// Maps tokenizer output back to words. Produced by whatever subword
/// tokenizer is in use; `from_token_counts` and `fixed_width` cover tests
/// and tokenizer-free use.
struct TokenAlignment {
  std::vector<TokenPosition> tokens;
  int ignore_index = -100;

  static TokenAlignment from_token_counts(std::span<const std::size_t> counts) {
    TokenAlignment a;
    for (std::size_t w = 0; w < counts.size(); ++w) {
      if (counts[w] == 0)
        throw Error(ErrorCode::InvalidConfig,
                    "word " + std::to_string(w) + " has no tokens");
      for (std::size_t k = 0; k < counts[w]; ++k) a.tokens.push_back({w, k == 0});
    }
    return a;
  }

  /// Splits every word into pieces of at most `width` code points.
  static TokenAlignment fixed_width(std::span<const WordSpan> words,
                                    std::size_t width) {
    if (width == 0) throw Error(ErrorCode::InvalidConfig, "zero piece width");
    std::vector<std::size_t> counts;
    counts.reserve(words.size());
    for (const auto& w : words) {
      const auto len = w.char_end - w.char_start;
      counts.push_back((len + width - 1) / width);
    }
    return from_token_counts(counts);
  }

  std::size_t word_count() const {
    return tokens.empty() ? 0 : tokens.back().word_index + 1;
  }

  void check() const {
    std::size_t expected = 0;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      const auto& tok = tokens[t];
      if (tok.is_first_of_word) {
        if (tok.word_index != expected)
          throw Error(ErrorCode::InvalidConfig,
                      "token " + std::to_string(t) + " skips or repeats a word");
        ++expected;
      } else if (t == 0 || tok.word_index != tokens[t - 1].word_index) {
        throw Error(ErrorCode::InvalidConfig,
                    "token " + std::to_string(t) + " continues a different word");
      }
    }
  }
};

/// std::nullopt marks a masked (ignored) token position.
using TokenLabel = std::optional<Label>;

enum class ProjectionMode {
  WordLevelMasked,  // continuation tokens are ignored in the loss
  TokenLevelFull,   // continuation tokens carry chunk-continuation labels
};

inline std::vector<TokenLabel> word_labels_to_token_labels(
    const LabelSequence& seq, const TokenAlignment& alignment,
    ProjectionMode mode) {
  alignment.check();
  if (seq.level() != Level::Word)
    throw Error(ErrorCode::InvalidConfig, "expected word-level labels");
  if (alignment.word_count() != seq.size())
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(alignment.word_count()) + " aligned words vs " +
                    std::to_string(seq.size()) + " labels");

  std::vector<TokenLabel> out;
  out.reserve(alignment.tokens.size());
  const auto& toks = alignment.tokens;
  for (std::size_t t = 0; t < toks.size(); ++t) {
    const auto& word = seq[toks[t].word_index];
    const bool first = toks[t].is_first_of_word;
    if (mode == ProjectionMode::WordLevelMasked) {
      out.push_back(first ? TokenLabel(word) : std::nullopt);
      continue;
    }
    const bool last = t + 1 == toks.size() || toks[t + 1].is_first_of_word;
    if (word.is_outside() || seq.scheme() == Scheme::IO) {
      out.push_back(word);
      continue;
    }
    Prefix p = Prefix::I;
    switch (word.prefix) {
      case Prefix::B: p = first ? Prefix::B : Prefix::I; break;
      case Prefix::I: p = Prefix::I; break;
      case Prefix::L: p = last ? Prefix::L : Prefix::I; break;
      case Prefix::U:
        p = first && last ? Prefix::U
            : first      ? Prefix::B
            : last       ? Prefix::L
                         : Prefix::I;
        break;
      case Prefix::O: break;
    }
    out.push_back(Label{p, word.class_name});
  }
  return out;
}

/// Each word takes its first token's label. Under BILOU a word whose last
/// token (when not masked) closes the chunk with L is folded back: B…L → U
/// and I…L → L, which inverts the TokenLevelFull projection.
inline LabelSequence token_labels_to_word_labels(
    std::span<const TokenLabel> token_labels, const TokenAlignment& alignment,
    Scheme scheme) {
  alignment.check();
  if (token_labels.size() != alignment.tokens.size())
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(token_labels.size()) + " token labels vs " +
                    std::to_string(alignment.tokens.size()) + " tokens");
  std::vector<Label> words;
  words.reserve(alignment.word_count());
  const auto& toks = alignment.tokens;
  for (std::size_t t = 0; t < toks.size(); ++t) {
    if (!toks[t].is_first_of_word) continue;
    if (!token_labels[t])
      throw Error(ErrorCode::InvalidConfig,
                  "first token of word " + std::to_string(toks[t].word_index) +
                      " is masked");
    Label label = *token_labels[t];
    std::size_t last = t;
    while (last + 1 < toks.size() && !toks[last + 1].is_first_of_word) ++last;
    if (scheme == Scheme::BILOU && last != t && token_labels[last] &&
        token_labels[last]->prefix == Prefix::L &&
        token_labels[last]->class_name == label.class_name) {
      if (label.prefix == Prefix::B) label.prefix = Prefix::U;
      else if (label.prefix == Prefix::I) label.prefix = Prefix::L;
    }
    words.push_back(std::move(label));
  }
  return LabelSequence(std::move(words), Level::Word, scheme);
}

/// Integer ids for a model head; masked positions map to alignment.ignore_index.
inline std::vector<int> token_label_ids(std::span<const TokenLabel> token_labels,
                                        std::span<const std::string> vocabulary,
                                        int ignore_index) {
  std::vector<int> ids;
  ids.reserve(token_labels.size());
  for (const auto& tl : token_labels) {
    if (!tl) {
      ids.push_back(ignore_index);
      continue;
    }
    const auto s = tl->str();
    const auto it = std::find(vocabulary.begin(), vocabulary.end(), s);
    if (it == vocabulary.end())
      throw Error(ErrorCode::InvalidConfig, "label '" + s + "' not in vocabulary");
    ids.push_back(static_cast<int>(it - vocabulary.begin()));
  }
  return ids;
}

}  // namespace seqlab
