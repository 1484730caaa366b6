#pragma once

// Decoding of label sequences into word-level chunks.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "seqlab/core.hpp"

namespace seqlab {

struct Chunk {
  std::string class_name;
  std::size_t word_start = 0;
  std::size_t word_end = 0;  // exclusive

  friend bool operator==(const Chunk&, const Chunk&) = default;
  friend auto operator<=>(const Chunk& a, const Chunk& b) {
    if (auto c = a.word_start <=> b.word_start; c != 0) return c;
    if (auto c = a.word_end <=> b.word_end; c != 0) return c;
    return a.class_name <=> b.class_name;
  }
};

enum class ExtractionMode {
  Strict,   // labels that break the scheme's transition rules are dropped
  Lenient,  // seqeval default-mode recovery
};

inline std::string_view to_string(ExtractionMode m) {
  return m == ExtractionMode::Strict ? "strict" : "lenient";
}

namespace detail {

inline std::vector<Chunk> extract_strict(std::span<const Label> labels,
                                         Scheme scheme) {
  std::vector<Chunk> out;
  const auto n = labels.size();
  std::size_t i = 0;
  while (i < n) {
    const auto& l = labels[i];
    if (scheme == Scheme::IO) {
      if (l.prefix != Prefix::I) {
        ++i;
        continue;
      }
      std::size_t j = i + 1;
      while (j < n && labels[j].prefix == Prefix::I &&
             labels[j].class_name == l.class_name)
        ++j;
      out.push_back({l.class_name, i, j});
      i = j;
    } else if (scheme == Scheme::BIO) {
      if (l.prefix != Prefix::B) {
        ++i;
        continue;
      }
      std::size_t j = i + 1;
      while (j < n && labels[j].prefix == Prefix::I &&
             labels[j].class_name == l.class_name)
        ++j;
      out.push_back({l.class_name, i, j});
      i = j;
    } else {
      if (l.prefix == Prefix::U) {
        out.push_back({l.class_name, i, i + 1});
        ++i;
        continue;
      }
      if (l.prefix != Prefix::B) {
        ++i;
        continue;
      }
      std::size_t j = i + 1;
      while (j < n && labels[j].prefix == Prefix::I &&
             labels[j].class_name == l.class_name)
        ++j;
      if (j < n && labels[j].prefix == Prefix::L &&
          labels[j].class_name == l.class_name) {
        out.push_back({l.class_name, i, j + 1});
        i = j + 1;
      } else {
        // unterminated: drop B..I and resume at the label that broke it
        i = j;
      }
    }
  }
  return out;
}

// seqeval's get_entities (default mode), with L spelled E and U spelled S.
inline char seqeval_tag(const Label& l) {
  switch (l.prefix) {
    case Prefix::L: return 'E';
    case Prefix::U: return 'S';
    default: return prefix_char(l.prefix);
  }
}

inline bool seqeval_end(char prev_tag, char tag, const std::string& prev_type,
                        const std::string& type) {
  if (prev_tag == 'E' || prev_tag == 'S') return true;
  if ((prev_tag == 'B' || prev_tag == 'I') &&
      (tag == 'B' || tag == 'S' || tag == 'O'))
    return true;
  return prev_tag != 'O' && prev_type != type;
}

inline bool seqeval_start(char prev_tag, char tag, const std::string& prev_type,
                          const std::string& type) {
  if (tag == 'B' || tag == 'S') return true;
  if ((prev_tag == 'E' || prev_tag == 'S' || prev_tag == 'O') &&
      (tag == 'E' || tag == 'I'))
    return true;
  return tag != 'O' && prev_type != type;
}

inline std::vector<Chunk> extract_lenient(std::span<const Label> labels) {
  std::vector<Chunk> out;
  char prev_tag = 'O';
  // seqeval types O as "_" and starts from ""; neither can be a class name
  // that reaches the comparisons below with a non-O tag.
  std::string prev_type;
  std::size_t begin = 0;
  for (std::size_t i = 0; i <= labels.size(); ++i) {
    const bool sentinel = i == labels.size();
    const char tag = sentinel ? 'O' : seqeval_tag(labels[i]);
    const std::string type =
        sentinel || labels[i].is_outside() ? std::string("_")
                                           : labels[i].class_name;
    if (seqeval_end(prev_tag, tag, prev_type, type))
      out.push_back({prev_type, begin, i});
    if (seqeval_start(prev_tag, tag, prev_type, type)) begin = i;
    prev_tag = tag;
    prev_type = type;
  }
  return out;
}

}  // namespace detail

inline std::vector<Chunk> extract_entities(std::span<const Label> labels,
                                           Scheme scheme, ExtractionMode mode) {
  return mode == ExtractionMode::Strict ? detail::extract_strict(labels, scheme)
                                        : detail::extract_lenient(labels);
}

inline std::vector<Chunk> extract_entities(const LabelSequence& seq,
                                           ExtractionMode mode) {
  return extract_entities(seq.labels(), seq.scheme(), mode);
}

/// Labels spelling `chunks` over `length` words in `scheme`. Chunks must be
/// sorted and non-overlapping.
inline std::vector<Label> emit_labels(std::span<const Chunk> chunks,
                                      std::size_t length, Scheme scheme) {
  std::vector<Label> out(length);
  for (const auto& c : chunks) {
    for (std::size_t i = c.word_start; i < c.word_end; ++i) {
      Prefix p = Prefix::I;
      if (scheme == Scheme::BIO && i == c.word_start) p = Prefix::B;
      if (scheme == Scheme::BILOU) {
        if (c.word_end - c.word_start == 1) p = Prefix::U;
        else if (i == c.word_start) p = Prefix::B;
        else if (i + 1 == c.word_end) p = Prefix::L;
      }
      out.at(i) = Label{p, c.class_name};
    }
  }
  return out;
}

}  // namespace seqlab
