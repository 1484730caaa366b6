#pragma once

// The pluggable tagger contract that stands in for a fine-tuned model, plus
// the deterministic baseline taggers used by the CLI and the tests.

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "seqlab/core.hpp"
#include "seqlab/schemes.hpp"

namespace seqlab {

struct TaggedWord {
  Label label;
  double probability = 1.0;
};

class Tagger {
 public:
  virtual ~Tagger() = default;

  /// One prediction per word, labels spelled in `scheme`.
  virtual std::vector<TaggedWord> tag(std::span<const std::string> words,
                                      Scheme scheme) const = 0;

  /// False for implementations that must not be called from several threads.
  virtual bool concurrent_safe() const { return true; }
};

class AllOutsideTagger final : public Tagger {
 public:
  std::vector<TaggedWord> tag(std::span<const std::string> words,
                              Scheme) const override {
    return std::vector<TaggedWord>(words.size());
  }
};

/// Greedy longest-match gazetteer. Keys are phrases of space-separated words.
class LexiconTagger final : public Tagger {
 public:
  explicit LexiconTagger(std::map<std::string, std::string> lexicon) {
    for (auto& [phrase, cls] : lexicon) {
      auto words = split_words(phrase);
      if (words.empty())
        throw Error(ErrorCode::InvalidConfig, "empty lexicon phrase");
      if (cls.empty() || cls == "O")
        throw Error(ErrorCode::InvalidConfig,
                    "invalid class for phrase '" + phrase + "'");
      std::string key;
      for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) key += ' ';
        key += words[i].surface;
      }
      max_words_ = std::max(max_words_, words.size());
      entries_[key] = cls;
    }
  }

  std::vector<TaggedWord> tag(std::span<const std::string> words,
                              Scheme scheme) const override {
    std::vector<Chunk> chunks;
    std::size_t i = 0;
    while (i < words.size()) {
      std::size_t matched = 0;
      const std::string* cls = nullptr;
      std::string key;
      for (std::size_t len = 1; len <= max_words_ && i + len <= words.size();
           ++len) {
        if (len > 1) key += ' ';
        key += words[i + len - 1];
        if (auto it = entries_.find(key); it != entries_.end()) {
          matched = len;
          cls = &it->second;
        }
      }
      if (matched) {
        chunks.push_back({*cls, i, i + matched});
        i += matched;
      } else {
        ++i;
      }
    }
    std::vector<TaggedWord> out;
    out.reserve(words.size());
    for (auto& l : emit_labels(chunks, words.size(), scheme))
      out.push_back({std::move(l), 1.0});
    return out;
  }

 private:
  std::unordered_map<std::string, std::string> entries_;
  std::size_t max_words_ = 0;
};

inline std::string join_words(std::span<const std::string> words) {
  std::string key;
  for (const auto& w : words) {
    key += w;
    key += '\x1f';
  }
  return key;
}

/// Replays gold annotations for known word sequences; unknown input is all O.
/// An oracle for checking the evaluation path end to end.
class GoldEchoTagger final : public Tagger {
 public:
  explicit GoldEchoTagger(std::span<const Document> documents) {
    for (const auto& doc : documents) {
      auto view = word_level_view(doc, Scheme::BIO);
      if (!view.labels) continue;
      std::vector<std::string> surfaces;
      for (const auto& w : view.words) surfaces.push_back(w.surface);
      gold_.try_emplace(join_words(surfaces),
                        extract_entities(*view.labels, ExtractionMode::Strict));
    }
  }

  std::vector<TaggedWord> tag(std::span<const std::string> words,
                              Scheme scheme) const override {
    std::vector<TaggedWord> out;
    out.reserve(words.size());
    const auto it = gold_.find(join_words(words));
    if (it == gold_.end()) return std::vector<TaggedWord>(words.size());
    for (auto& l : emit_labels(it->second, words.size(), scheme))
      out.push_back({std::move(l), 1.0});
    return out;
  }

 private:
  std::unordered_map<std::string, std::vector<Chunk>> gold_;
};

}  // namespace seqlab
