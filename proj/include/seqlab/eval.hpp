#pragma once

// Entity- and word-level precision/recall/F1 with micro, macro and per-class
// averages, plus the word-level confusion matrix.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "seqlab/chunks.hpp"
#include "seqlab/core.hpp"
#include "seqlab/schemes.hpp"
#include "seqlab/tagger.hpp"

namespace seqlab {

enum class EvalLevel { Entity, Word };

inline std::string_view to_string(EvalLevel l) {
  return l == EvalLevel::Entity ? "entity" : "word";
}

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

/// 0/0 is 0.
inline Metrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  Metrics m;
  if (tp + fp > 0) m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (m.precision + m.recall > 0)
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<std::string> labels)
      : labels_(std::move(labels)),
        counts_(labels_.size(), std::vector<std::size_t>(labels_.size(), 0)) {}

  const std::vector<std::string>& labels() const noexcept { return labels_; }

  std::size_t at(std::string_view gold, std::string_view pred) const {
    return counts_.at(index(gold)).at(index(pred));
  }

  std::size_t row_sum(std::string_view gold) const {
    const auto& row = counts_.at(index(gold));
    std::size_t s = 0;
    for (auto c : row) s += c;
    return s;
  }

  void add(std::string_view gold, std::string_view pred, std::size_t n = 1) {
    counts_.at(index(gold)).at(index(pred)) += n;
  }

  const std::vector<std::vector<std::size_t>>& counts() const noexcept {
    return counts_;
  }

 private:
  std::size_t index(std::string_view label) const {
    const auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end())
      throw Error(ErrorCode::InvalidConfig,
                  "label '" + std::string(label) + "' not in confusion matrix");
    return static_cast<std::size_t>(it - labels_.begin());
  }

  std::vector<std::string> labels_;
  std::vector<std::vector<std::size_t>> counts_;
};

struct EvalReport {
  EvalLevel level = EvalLevel::Entity;
  ExtractionMode mode = ExtractionMode::Strict;
  std::map<std::string, ClassMetrics> per_class;
  Metrics micro;
  Metrics macro;
  std::size_t macro_classes = 0;  // classes with nonzero support
  std::optional<ConfusionMatrix> confusion;
};

// ---------------------------------------------------------------------------
// Count accumulation

struct ClassCounts {
  std::size_t tp = 0, fp = 0, fn = 0;
};

/// Pooled TP/FP/FN per class; reports are derived from a tally so that
/// document-level counts can be merged in any order.
class Tally {
 public:
  void true_positive(const std::string& cls) { ++counts_[cls].tp; }
  void false_positive(const std::string& cls) { ++counts_[cls].fp; }
  void false_negative(const std::string& cls) { ++counts_[cls].fn; }

  void merge(const Tally& other) {
    for (const auto& [cls, c] : other.counts_) {
      auto& mine = counts_[cls];
      mine.tp += c.tp;
      mine.fp += c.fp;
      mine.fn += c.fn;
    }
  }

  const std::map<std::string, ClassCounts>& counts() const noexcept { return counts_; }

  EvalReport report(const TagSet& tagset, EvalLevel level, ExtractionMode mode) const {
    EvalReport r;
    r.level = level;
    r.mode = mode;
    for (const auto& cls : tagset.classes()) r.per_class[cls];
    std::size_t tp = 0, fp = 0, fn = 0;
    for (const auto& [cls, c] : counts_) {
      auto& pc = r.per_class[cls];
      pc.tp = c.tp;
      pc.fp = c.fp;
      pc.fn = c.fn;
      tp += c.tp;
      fp += c.fp;
      fn += c.fn;
    }
    double sp = 0, sr = 0, sf = 0;
    for (auto& [cls, pc] : r.per_class) {
      const auto m = metrics_from_counts(pc.tp, pc.fp, pc.fn);
      pc.precision = m.precision;
      pc.recall = m.recall;
      pc.f1 = m.f1;
      pc.support = pc.tp + pc.fn;
      if (pc.support > 0) {
        sp += m.precision;
        sr += m.recall;
        sf += m.f1;
        ++r.macro_classes;
      }
    }
    r.micro = metrics_from_counts(tp, fp, fn);
    if (r.macro_classes > 0) {
      const auto k = static_cast<double>(r.macro_classes);
      r.macro = {sp / k, sr / k, sf / k};
    }
    return r;
  }

 private:
  std::map<std::string, ClassCounts> counts_;
};

namespace detail {

inline void check_no_overlap(std::span<const Chunk> chunks, const char* which) {
  std::vector<Chunk> sorted(chunks.begin(), chunks.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].word_start >= sorted[i].word_end)
      throw Error(ErrorCode::OverlapWithinList,
                  std::string(which) + " contains an empty chunk");
    if (i > 0 && sorted[i].word_start < sorted[i - 1].word_end)
      throw Error(ErrorCode::OverlapWithinList,
                  std::string(which) + " chunks overlap at word " +
                      std::to_string(sorted[i].word_start));
  }
}

}  // namespace detail

/// Exact (class, start, end) matching.
inline void tally_entities(std::span<const Chunk> gold, std::span<const Chunk> pred,
                           Tally& tally) {
  detail::check_no_overlap(gold, "gold");
  detail::check_no_overlap(pred, "pred");
  for (const auto& p : pred) {
    if (std::find(gold.begin(), gold.end(), p) != gold.end())
      tally.true_positive(p.class_name);
    else
      tally.false_positive(p.class_name);
  }
  for (const auto& g : gold)
    if (std::find(pred.begin(), pred.end(), g) == pred.end())
      tally.false_negative(g.class_name);
}

inline EvalReport score_entities(std::span<const Chunk> gold,
                                 std::span<const Chunk> pred, const TagSet& tagset,
                                 ExtractionMode mode = ExtractionMode::Strict) {
  Tally tally;
  tally_entities(gold, pred, tally);
  return tally.report(tagset, EvalLevel::Entity, mode);
}

inline std::string word_class(const Label& l) {
  return l.is_outside() ? std::string("O") : l.class_name;
}

/// Prefixes are stripped: B-PER and I-PER are both PER.
inline void tally_words(const LabelSequence& gold, const LabelSequence& pred,
                        Tally& tally, std::map<std::string, std::map<std::string, std::size_t>>* cells) {
  if (gold.size() != pred.size())
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(gold.size()) + " gold vs " +
                    std::to_string(pred.size()) + " predicted words");
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto g = word_class(gold[i]);
    const auto p = word_class(pred[i]);
    if (cells) ++(*cells)[g][p];
    if (g == p) {
      if (g != "O") tally.true_positive(g);
      continue;
    }
    if (p != "O") tally.false_positive(p);
    if (g != "O") tally.false_negative(g);
  }
}

using ConfusionCells = std::map<std::string, std::map<std::string, std::size_t>>;

inline ConfusionMatrix build_confusion(const TagSet& tagset, const ConfusionCells& cells) {
  std::vector<std::string> labels = tagset.classes();
  auto add = [&](const std::string& l) {
    if (l != "O" && std::find(labels.begin(), labels.end(), l) == labels.end())
      labels.push_back(l);
  };
  for (const auto& [g, row] : cells) {
    add(g);
    for (const auto& [p, n] : row) add(p);
  }
  labels.push_back("O");
  ConfusionMatrix cm(labels);
  for (const auto& [g, row] : cells)
    for (const auto& [p, n] : row) cm.add(g, p, n);
  return cm;
}

inline EvalReport score_words(const LabelSequence& gold, const LabelSequence& pred,
                              const TagSet& tagset) {
  Tally tally;
  ConfusionCells cells;
  tally_words(gold, pred, tally, &cells);
  auto r = tally.report(tagset, EvalLevel::Word, ExtractionMode::Strict);
  r.confusion = build_confusion(tagset, cells);
  return r;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const Metrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

inline nlohmann::json to_json(const ClassMetrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
          {"support", m.support},     {"tp", m.tp},         {"fp", m.fp},
          {"fn", m.fn}};
}

inline nlohmann::json to_json(const ConfusionMatrix& cm) {
  return {{"labels", cm.labels()}, {"counts", cm.counts()}};
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j;
  j["level"] = to_string(r.level);
  j["mode"] = to_string(r.mode);
  j["micro"] = to_json(r.micro);
  j["macro"] = to_json(r.macro);
  j["macro"]["classes"] = r.macro_classes;
  j["per_class"] = nlohmann::json::object();
  for (const auto& [cls, m] : r.per_class) j["per_class"][cls] = to_json(m);
  if (r.confusion) j["confusion"] = to_json(*r.confusion);
  return j;
}

// ---------------------------------------------------------------------------
// Dataset evaluation

struct DatasetEvaluation {
  EvalReport strict_entity;
  EvalReport strict_word;
  EvalReport lenient_entity;
  Scheme scheme = Scheme::BIO;
  std::size_t documents = 0;
};

/// Nested as results[mode][average][level][metric]; the top-level "micro"
/// and "macro" blocks repeat the strict results, which are the default.
inline nlohmann::json to_json(const DatasetEvaluation& e) {
  auto block = [](const EvalReport& entity, const EvalReport* word) {
    nlohmann::json b;
    b["micro"]["entity"] = to_json(entity.micro);
    b["macro"]["entity"] = to_json(entity.macro);
    b["per_class"]["entity"] = nlohmann::json::object();
    for (const auto& [c, m] : entity.per_class) b["per_class"]["entity"][c] = to_json(m);
    if (word) {
      b["micro"]["word"] = to_json(word->micro);
      b["macro"]["word"] = to_json(word->macro);
      b["per_class"]["word"] = nlohmann::json::object();
      for (const auto& [c, m] : word->per_class) b["per_class"]["word"][c] = to_json(m);
      if (word->confusion) b["confusion"] = to_json(*word->confusion);
    }
    return b;
  };
  nlohmann::json j;
  j["strict"] = block(e.strict_entity, &e.strict_word);
  j["lenient"] = block(e.lenient_entity, nullptr);
  j["micro"] = j["strict"]["micro"];
  j["macro"] = j["strict"]["macro"];
  j["meta"] = {{"scheme", to_string(e.scheme)},
               {"documents", e.documents},
               {"macro_average", "unweighted mean over classes with support > 0"},
               {"lenient_semantics", "seqeval default mode"}};
  return j;
}

namespace detail {

struct DocTallies {
  Tally strict_entity, lenient_entity, word;
  ConfusionCells cells;
  std::vector<std::string> classes;
};

inline DocTallies evaluate_document(const Tagger& tagger, const Document& doc,
                                    std::size_t index, Scheme scheme) {
  const auto view = word_level_view(doc, scheme);
  if (!view.labels)
    throw Error(ErrorCode::MissingGold,
                "document " + std::to_string(index) + " has no gold annotation");
  std::vector<std::string> surfaces;
  surfaces.reserve(view.words.size());
  for (const auto& w : view.words) surfaces.push_back(w.surface);
  const auto tagged = tagger.tag(surfaces, scheme);
  if (tagged.size() != surfaces.size())
    throw Error(ErrorCode::TaggerLengthMismatch,
                "document " + std::to_string(index) + ": " +
                    std::to_string(tagged.size()) + " predictions for " +
                    std::to_string(surfaces.size()) + " words");
  std::vector<Label> pred_labels;
  pred_labels.reserve(tagged.size());
  for (const auto& t : tagged) pred_labels.push_back(t.label);
  const LabelSequence pred(std::move(pred_labels), Level::Word, scheme);
  const auto& gold = *view.labels;

  DocTallies out;
  tally_entities(extract_entities(gold, ExtractionMode::Strict),
                 extract_entities(pred, ExtractionMode::Strict), out.strict_entity);
  tally_entities(extract_entities(gold, ExtractionMode::Lenient),
                 extract_entities(pred, ExtractionMode::Lenient), out.lenient_entity);
  tally_words(gold, pred, out.word, &out.cells);
  for (const auto& l : gold)
    if (!l.is_outside()) out.classes.push_back(l.class_name);
  return out;
}

}  // namespace detail

/// Runs `tagger` over every document and scores strict/lenient entities and
/// words. With workers > 1 and a concurrent-safe tagger, documents are
/// processed in parallel; pooled counts make the result order-independent.
inline DatasetEvaluation evaluate_on_dataset(const Tagger& tagger,
                                             std::span<const Document> documents,
                                             Scheme scheme, unsigned workers = 1) {
  std::vector<detail::DocTallies> per_doc(documents.size());
  if (workers <= 1 || !tagger.concurrent_safe() || documents.size() < 2) {
    for (std::size_t i = 0; i < documents.size(); ++i)
      per_doc[i] = detail::evaluate_document(tagger, documents[i], i, scheme);
  } else {
    const auto n = std::min<std::size_t>(workers, documents.size());
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < documents.size(); i += n)
            per_doc[i] = detail::evaluate_document(tagger, documents[i], i, scheme);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  Tally strict_entity, lenient_entity, word;
  ConfusionCells cells;
  TagSet tagset;
  for (const auto& d : per_doc) {
    strict_entity.merge(d.strict_entity);
    lenient_entity.merge(d.lenient_entity);
    word.merge(d.word);
    for (const auto& [g, row] : d.cells)
      for (const auto& [p, n] : row) cells[g][p] += n;
    for (const auto& c : d.classes) tagset.add(c);
  }
  // tag set ordering must not depend on document order
  std::vector<std::string> classes = tagset.classes();
  std::sort(classes.begin(), classes.end());
  tagset = TagSet(classes);

  DatasetEvaluation e;
  e.scheme = scheme;
  e.documents = documents.size();
  e.strict_entity = strict_entity.report(tagset, EvalLevel::Entity, ExtractionMode::Strict);
  e.lenient_entity = lenient_entity.report(tagset, EvalLevel::Entity, ExtractionMode::Lenient);
  e.strict_word = word.report(tagset, EvalLevel::Word, ExtractionMode::Strict);
  e.strict_word.confusion = build_confusion(tagset, cells);
  return e;
}

}  // namespace seqlab
