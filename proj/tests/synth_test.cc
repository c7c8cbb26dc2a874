#include <doctest.h>

#include <algorithm>

#include "techterm/error.h"
#include "techterm/synth.h"
#include "techterm/text.h"
#include "test_util.h"

using namespace techterm;
using techterm::testing::data_path;

namespace {

std::vector<std::string> folded_run(const LabeledSentence &ls, std::size_t start,
                                    std::size_t end) {
  std::vector<std::string> out;
  for (std::size_t i = start; i <= end; ++i) out.push_back(case_fold(ls.sentence.tokens[i].text));
  return out;
}

}  // namespace

TEST_CASE("synthesize") {
  Gazetteer gazetteer = Gazetteer::load_file(data_path("gazetteer.txt"));
  REQUIRE(gazetteer.size() == 50);
  SynthConfig config;
  config.sentences = 1000;
  config.seed = 21;
  SynthCorpus corpus = synthesize(gazetteer, config);

  SUBCASE("size and mix") {
    CHECK(corpus.gold.size() == 1000);
    ClassCounts counts = count_classes(corpus.gold);
    CHECK(counts.positive >= 450);
    CHECK(counts.positive <= 550);
  }
  SUBCASE("every T-run is a gazetteer term") {
    for (const auto &ls : corpus.gold) {
      const auto &y = ls.token_labels;
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != TokenLabel::T || (i > 0 && y[i - 1] == TokenLabel::T)) continue;
        std::size_t j = i;
        while (j + 1 < y.size() && y[j + 1] == TokenLabel::T) ++j;
        auto run = folded_run(ls, i, j);
        CHECK(gazetteer.contains(run));
      }
      CHECK((ls.sentence_label == SentenceLabel::ContainsTech) ==
            (std::count(y.begin(), y.end(), TokenLabel::T) > 0));
    }
  }
  SUBCASE("annotating the documents reproduces the gold labels") {
    auto annotated = annotate_corpus(corpus.documents, gazetteer);
    REQUIRE(annotated.size() == corpus.gold.size());
    for (std::size_t k = 0; k < annotated.size(); ++k) {
      CHECK(annotated[k].token_labels == corpus.gold[k].token_labels);
      CHECK(annotated[k].sentence.doc_id == corpus.gold[k].sentence.doc_id);
      CHECK(annotated[k].sentence.index == corpus.gold[k].sentence.index);
    }
  }
  SUBCASE("offsets point into the document text") {
    std::size_t d = 0;
    for (const auto &ls : corpus.gold) {
      while (corpus.documents[d].id != ls.sentence.doc_id) ++d;
      for (const Token &t : ls.sentence.tokens)
        CHECK(corpus.documents[d].text.substr(t.start, t.end - t.start) == t.text);
    }
  }
  SUBCASE("deterministic") {
    SynthCorpus again = synthesize(gazetteer, config);
    REQUIRE(again.documents.size() == corpus.documents.size());
    for (std::size_t k = 0; k < again.documents.size(); ++k) {
      CHECK(again.documents[k].id == corpus.documents[k].id);
      CHECK(again.documents[k].text == corpus.documents[k].text);
    }
    config.seed = 22;
    CHECK(synthesize(gazetteer, config).documents[0].text != corpus.documents[0].text);
  }
  SUBCASE("errors") {
    config.sentences = 0;
    CHECK_THROWS_AS(synthesize(gazetteer, config), ConfigError);
  }
}

TEST_CASE("filler phrases never collide with the gazetteer") {
  // "google" and "bank" clash with built-in subjects
  Gazetteer g = Gazetteer::from_terms({"Google", "bank", "Hive"});
  SynthConfig config;
  config.sentences = 400;
  SynthCorpus corpus = synthesize(g, config);
  auto annotated = annotate_corpus(corpus.documents, g);
  for (std::size_t k = 0; k < annotated.size(); ++k)
    CHECK(annotated[k].token_labels == corpus.gold[k].token_labels);
}
