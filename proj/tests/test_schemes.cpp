#include <gtest/gtest.h>

#include "seqlab/schemes.hpp"
#include "support.hpp"

using namespace seqlab;
using namespace seqlab::testing;

namespace {

LabelSequence seq_of(Scheme s, const std::vector<Label>& labels) {
  return LabelSequence(labels, Level::Word, s);
}

LabelSequence parse_seq(Scheme s, std::vector<std::string> raw) {
  return LabelSequence::parse(raw, Level::Word, s);
}

Document doc_with_words(const std::string& text) {
  Document d;
  d.text = text;
  d.words = split_words(text);
  return d;
}

}  // namespace

TEST(Detect, PicksRichestPrefixSet) {
  using V = std::vector<std::vector<std::string>>;
  EXPECT_EQ(detect_scheme(V{{"O", "I-PER"}}), Scheme::IO);
  EXPECT_EQ(detect_scheme(V{{"B-PER", "I-PER"}, {"O"}}), Scheme::BIO);
  EXPECT_EQ(detect_scheme(V{{"B-PER", "L-PER"}}), Scheme::BILOU);
  EXPECT_EQ(detect_scheme(V{{"O"}, {"U-LOC"}}), Scheme::BILOU);
  try {
    detect_scheme(V{{"O", "O"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AllOutside);
  }
}

TEST(Convert, Examples) {
  EXPECT_EQ(convert_scheme(parse_seq(Scheme::BIO, {"B-PER", "I-PER", "O", "B-LOC"}),
                           Scheme::BILOU)
                .strings(),
            (std::vector<std::string>{"B-PER", "L-PER", "O", "U-LOC"}));
  EXPECT_EQ(convert_scheme(parse_seq(Scheme::BIO, {"B-PER", "B-PER"}), Scheme::IO).strings(),
            (std::vector<std::string>{"I-PER", "I-PER"}));
  EXPECT_EQ(convert_scheme(parse_seq(Scheme::IO, {"I-PER", "I-PER", "I-LOC"}), Scheme::BIO)
                .strings(),
            (std::vector<std::string>{"B-PER", "I-PER", "B-LOC"}));
}

TEST(Convert, RefusesInconsistentSource) {
  try {
    convert_scheme(parse_seq(Scheme::BIO, {"O", "I-PER"}), Scheme::BILOU);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InconsistentSource);
  }
}

TEST(Convert, RoundTripsAndPreservesChunks) {
  Rng rng(101);
  const std::vector<std::string> classes{"PER", "ORG", "LOC"};
  for (int i = 0; i < 3000; ++i) {
    std::set<ChunkTriple> built;
    const auto bio = seq_of(Scheme::BIO,
                            random_consistent(rng, Scheme::BIO, classes, uniform(rng, 0, 20), &built));
    const auto bilou = convert_scheme(bio, Scheme::BILOU);
    ASSERT_EQ(convert_scheme(bilou, Scheme::BIO), bio);
    ASSERT_EQ(oracle_chunks(bilou.labels(), Scheme::BILOU), built);
    ASSERT_EQ(convert_scheme(bio, Scheme::BIO), bio);

    const auto io = convert_scheme(bio, Scheme::IO);
    const auto chunks = extract_entities(bio, ExtractionMode::Strict);
    ASSERT_EQ(oracle_chunks(io.labels(), Scheme::IO).size() + count_io_merges(chunks),
              chunks.size());
  }
}

TEST(Convert, IsIdempotent) {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i)
    for (auto from : {Scheme::IO, Scheme::BIO, Scheme::BILOU})
      for (auto to : {Scheme::IO, Scheme::BIO, Scheme::BILOU}) {
        const auto s = seq_of(from, random_consistent(rng, from, {"A", "B"}, uniform(rng, 0, 12)));
        const auto once = convert_scheme(s, to);
        ASSERT_EQ(convert_scheme(once, to), once);
      }
}

TEST(Words, SplitOnUnicodeWhitespace) {
  const auto words = split_words("  Grüße aus\tBerlin !\n");
  ASSERT_EQ(words.size(), 4u);
  EXPECT_EQ(words[0], (WordSpan{"Grüße", 2, 7}));
  EXPECT_EQ(words[1], (WordSpan{"aus", 8, 11}));
  EXPECT_EQ(words[3], (WordSpan{"!", 19, 20}));
  EXPECT_TRUE(split_words(" \t\n").empty());
}

TEST(EntitiesToWords, AlignsAndRejectsPartialWords) {
  auto d = doc_with_words("The United Nations met");
  d.entities = std::vector<EntitySpan>{{"ORG", 4, 18, std::nullopt, std::nullopt, "United Nations"}};
  EXPECT_EQ(entities_to_word_labels(d, Scheme::BILOU).strings(),
            (std::vector<std::string>{"O", "B-ORG", "L-ORG", "O"}));
  d.entities = std::vector<EntitySpan>{{"ORG", 5, 18, std::nullopt, std::nullopt, "nited Nations"}};
  try {
    entities_to_word_labels(d, Scheme::BIO);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MisalignedEntity);
  }
  d.entities = std::vector<EntitySpan>{{"ORG", 4, 16, std::nullopt, std::nullopt, "United Natio"}};
  EXPECT_THROW(entities_to_word_labels(d, Scheme::BIO), Error);
}

TEST(EntitiesToWords, WordEntityRoundTrip) {
  Rng rng(9);
  for (int i = 0; i < 500; ++i) {
    const auto n = uniform(rng, 1, 10);
    std::string text;
    for (std::size_t w = 0; w < n; ++w) text += (w ? " " : "") + std::string(uniform(rng, 1, 4), 'x');
    auto d = doc_with_words(text);
    d.word_labels = seq_of(Scheme::BIO, random_consistent(rng, Scheme::BIO, {"A", "B"}, n));
    Document e = d;
    e.entities = word_labels_to_entities(d);
    e.word_labels.reset();
    for (const auto& span : *e.entities)
      ASSERT_EQ(utf8::IndexedText(text).slice(span.char_start, span.char_end), span.surface);
    ASSERT_EQ(entities_to_word_labels(e, Scheme::BIO), *d.word_labels);
  }
}

TEST(Tokens, FullProjectionExamples) {
  const auto align = TokenAlignment::from_token_counts(std::vector<std::size_t>{2, 3, 1, 2});
  auto project = [&](Scheme s, std::vector<std::string> raw) {
    std::vector<std::string> out;
    for (const auto& t :
         word_labels_to_token_labels(parse_seq(s, raw), align, ProjectionMode::TokenLevelFull))
      out.push_back(t ? t->str() : "-");
    return out;
  };
  EXPECT_EQ(project(Scheme::BIO, {"B-PER", "I-PER", "O", "B-LOC"}),
            (std::vector<std::string>{"B-PER", "I-PER", "I-PER", "I-PER", "I-PER", "O", "B-LOC",
                                      "I-LOC"}));
  EXPECT_EQ(project(Scheme::BILOU, {"B-PER", "L-PER", "O", "U-LOC"}),
            (std::vector<std::string>{"B-PER", "I-PER", "I-PER", "I-PER", "L-PER", "O", "B-LOC",
                                      "L-LOC"}));
}

TEST(Tokens, MaskedProjectionUsesIgnoreIndex) {
  const auto align = TokenAlignment::from_token_counts(std::vector<std::size_t>{1, 3});
  const auto tl = word_labels_to_token_labels(parse_seq(Scheme::BIO, {"O", "B-PER"}), align,
                                              ProjectionMode::WordLevelMasked);
  const std::vector<std::string> vocab{"O", "B-PER", "I-PER"};
  EXPECT_EQ(token_label_ids(tl, vocab, align.ignore_index), (std::vector<int>{0, 1, -100, -100}));
}

TEST(Tokens, ProjectionRoundTripsInBothModes) {
  Rng rng(77);
  for (int i = 0; i < 2000; ++i)
    for (auto scheme : {Scheme::IO, Scheme::BIO, Scheme::BILOU}) {
      const auto n = uniform(rng, 1, 10);
      const auto seq = seq_of(scheme, random_consistent(rng, scheme, {"A", "B"}, n));
      std::vector<std::size_t> counts;
      for (std::size_t w = 0; w < n; ++w) counts.push_back(uniform(rng, 1, 4));
      const auto align = TokenAlignment::from_token_counts(counts);
      for (auto mode : {ProjectionMode::WordLevelMasked, ProjectionMode::TokenLevelFull}) {
        const auto tl = word_labels_to_token_labels(seq, align, mode);
        ASSERT_EQ(tl.size(), align.tokens.size());
        ASSERT_EQ(token_labels_to_word_labels(tl, align, scheme), seq) << join(seq.labels());
      }
    }
}

TEST(Tokens, AlignmentChecks) {
  TokenAlignment bad;
  bad.tokens = {{0, true}, {2, true}};
  EXPECT_THROW(bad.check(), Error);
  EXPECT_THROW(TokenAlignment::from_token_counts(std::vector<std::size_t>{1, 0}), Error);
  const auto words = split_words("abcdefg hi");
  const auto fw = TokenAlignment::fixed_width(words, 3);
  EXPECT_EQ(fw.tokens.size(), 4u);
  EXPECT_EQ(fw.word_count(), 2u);
}
