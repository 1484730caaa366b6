#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "seqlab/infer.hpp"
#include "support.hpp"

using namespace seqlab;
using namespace seqlab::testing;

namespace {

const LexiconTagger& fixture_lexicon() {
  static const LexiconTagger t(std::map<std::string, std::string>{{"United Nations", "ORG"}, {"Köln", "LOC"}, {"東京", "LOC"},
                                {"Ada Lovelace", "PER"}});
  return t;
}

// Labels every word B-/I- by alternating; probabilities fall with position.
struct FadingTagger final : Tagger {
  std::vector<TaggedWord> tag(std::span<const std::string> words, Scheme) const override {
    std::vector<TaggedWord> out;
    for (std::size_t i = 0; i < words.size(); ++i)
      out.push_back({Label::make(i % 3 == 0 ? Prefix::B : Prefix::I, "X"), 1.0 / double(i + 1)});
    return out;
  }
};

struct BadPrefixTagger final : Tagger {
  std::vector<TaggedWord> tag(std::span<const std::string> words, Scheme) const override {
    return std::vector<TaggedWord>(words.size(), TaggedWord{Label::make(Prefix::U, "X"), 1.0});
  }
};

std::string random_text(Rng& rng) {
  static const std::vector<std::string> pieces{
      "United", "Nations", "Köln", "東京", "Ada", "Lovelace", "the", "😀", "naïve", "x"};
  static const std::vector<std::string> gaps{" ", "  ", "\t", "\n", " ", "　"};
  std::string s;
  if (uniform(rng, 0, 3) == 0) s += gaps[uniform(rng, 0, gaps.size() - 1)];
  const auto n = uniform(rng, 1, 12);
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += gaps[uniform(rng, 0, gaps.size() - 1)];
    s += pieces[uniform(rng, 0, pieces.size() - 1)];
  }
  return s;
}

}  // namespace

TEST(Predict, EntityOffsets) {
  const auto p = std::get<std::vector<EntityPrediction>>(predict(fixture_lexicon(), "The United Nations"));
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].span.char_start, 4u);
  EXPECT_EQ(p[0].span.char_end, 18u);
  EXPECT_EQ(p[0].span.surface, "United Nations");
  EXPECT_EQ(p[0].span.class_name, "ORG");
  EXPECT_FALSE(p[0].probability);
  const auto j = to_json(Prediction(p));
  EXPECT_EQ(j.dump(), R"([{"char_end":18,"char_start":4,"tag":"ORG","token":"United Nations"}])");
}

TEST(Predict, CodePointOffsetsOnNonAscii) {
  const auto p = std::get<std::vector<EntityPrediction>>(predict(fixture_lexicon(), "Zoë in Köln und 東京"));
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0].span.char_start, 7u);
  EXPECT_EQ(p[0].span.char_end, 11u);
  EXPECT_EQ(p[1].span.char_start, 16u);
  EXPECT_EQ(p[1].span.char_end, 18u);
}

TEST(Predict, SliceInvariantOnFuzzedTexts) {
  Rng rng(1234);
  PredictOptions word_level;
  word_level.level = PredictionLevel::Word;
  for (int i = 0; i < 1000; ++i) {
    const auto text = random_text(rng);
    const utf8::IndexedText idx(text);
    const auto entities = predict(fixture_lexicon(), text);
    for (const auto& e : std::get<std::vector<EntityPrediction>>(entities))
      ASSERT_EQ(idx.slice(e.span.char_start, e.span.char_end), e.span.surface) << text;
    const auto tagged = predict(fixture_lexicon(), text, word_level);
    for (const auto& w : std::get<std::vector<WordPrediction>>(tagged))
      ASSERT_EQ(idx.slice(w.char_start, w.char_end), w.word) << text;
  }
}

TEST(Predict, WordLevelAndProbabilities) {
  PredictOptions opts;
  opts.level = PredictionLevel::Word;
  opts.with_probabilities = true;
  const auto w = std::get<std::vector<WordPrediction>>(predict(FadingTagger(), "a b c d", opts));
  ASSERT_EQ(w.size(), 4u);
  EXPECT_EQ(w[1].label.str(), "I-X");
  EXPECT_DOUBLE_EQ(*w[3].probability, 0.25);

  opts.level = PredictionLevel::Entity;
  const auto e = std::get<std::vector<EntityPrediction>>(predict(FadingTagger(), "a b c d", opts));
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0].span.surface, "a b c");
  EXPECT_DOUBLE_EQ(*e[0].probability, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(*e[1].probability, 0.25);
}

TEST(Predict, Errors) {
  try {
    predict(fixture_lexicon(), " \t ");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyText);
  }
  EXPECT_THROW(predict(BadPrefixTagger(), "a b"), Error);
  PredictOptions bilou;
  bilou.scheme = Scheme::BILOU;
  EXPECT_NO_THROW(predict(BadPrefixTagger(), "a b", bilou));
}

TEST(Batch, FailuresAreIsolated) {
  const std::vector<std::string> texts{"The United Nations", "", "Ada Lovelace", "   "};
  for (unsigned workers : {1u, 4u}) {
    const auto r = predict_batch(fixture_lexicon(), texts, {}, workers);
    ASSERT_EQ(r.size(), 4u);
    EXPECT_TRUE(r[0].ok());
    EXPECT_FALSE(r[1].ok());
    EXPECT_TRUE(r[2].ok());
    EXPECT_FALSE(r[3].ok());
    EXPECT_NE(r[1].error.find("EmptyText"), std::string::npos);
  }
}

TEST(File, MatchesSingleTextPredictions) {
  Rng rng(99);
  std::ostringstream input;
  std::vector<std::string> texts;
  for (int i = 0; i < 150; ++i) {
    texts.push_back(random_text(rng));
    input << nlohmann::json{{"text", texts.back()}}.dump() << '\n';
  }
  input << "{not json\n" << R"({"text": "  "})" << '\n';
  for (std::size_t batch : {1u, 7u, 64u}) {
    std::istringstream in(input.str());
    std::ostringstream out;
    FileOptions opts;
    opts.batch_size = batch;
    opts.workers = 2;
    const auto summary = predict_stream(fixture_lexicon(), in, out, opts);
    EXPECT_EQ(summary.processed, 150u);
    EXPECT_EQ(summary.failed, 2u);
    std::istringstream lines(out.str());
    std::string line;
    std::size_t k = 0;
    while (std::getline(lines, line)) {
      const auto j = nlohmann::json::parse(line);
      if (k < texts.size()) {
        EXPECT_EQ(j["text"], texts[k]);
        EXPECT_EQ(j["predictions"], to_json(predict(fixture_lexicon(), texts[k])));
      } else {
        EXPECT_EQ(j["line"], k + 1);
        EXPECT_TRUE(j.contains("error"));
      }
      ++k;
    }
    EXPECT_EQ(k, texts.size() + 2);
  }
}

TEST(File, PathsRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "seqlab_infer_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "in.jsonl");
    f << R"({"text": "The United Nations"})" << '\n';
  }
  const auto s = predict_file(fixture_lexicon(), (dir / "in.jsonl").string(), (dir / "out.jsonl").string());
  EXPECT_EQ(s.processed, 1u);
  EXPECT_NE(slurp(dir / "out.jsonl").find("\"char_start\":4"), std::string::npos);
  EXPECT_THROW(predict_file(fixture_lexicon(), (dir / "missing.jsonl").string(), (dir / "o").string()),
               Error);
  std::filesystem::remove_all(dir);
}
