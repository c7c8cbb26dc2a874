#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "rational_oracle.h"
#include "techterm/error.h"
#include "techterm/eval.h"
#include "techterm/rng.h"
#include "test_util.h"

using namespace techterm;
using namespace techterm::testing;

namespace {

LabeledSentence labeled(const std::string &pattern) {
  std::vector<std::string> words;
  for (std::size_t k = 0; k < pattern.size(); ++k) words.push_back("w" + std::to_string(k));
  return make_labeled(make_sentence(words), labels(pattern));
}

std::vector<LabeledSentence> random_dataset(Rng &rng, std::size_t n) {
  std::vector<LabeledSentence> out;
  for (std::size_t k = 0; k < n; ++k) {
    std::string p;
    std::size_t len = 1 + rng.uniform_index(8);
    bool positive = rng.uniform_index(2);
    for (std::size_t i = 0; i < len; ++i) p += positive && rng.uniform_index(3) == 0 ? 'T' : 'O';
    out.push_back(labeled(p));
  }
  return out;
}

std::vector<TokenLabel> random_labels(Rng &rng, std::size_t n) {
  std::vector<TokenLabel> y(n);
  for (auto &l : y) l = rng.uniform_index(3) == 0 ? TokenLabel::T : TokenLabel::O;
  return y;
}

}  // namespace

TEST_CASE("f_score examples") {
  EvalReport r = f_score({3, 1, 0, 3});
  CHECK(r.precision == doctest::Approx(0.75));
  CHECK(r.recall == doctest::Approx(0.5));
  CHECK(r.f_score == doctest::Approx(0.6));
  EvalReport zero = f_score({0, 0, 0, 0});
  CHECK(zero.precision == 0.0);
  CHECK(zero.recall == 0.0);
  CHECK(zero.f_score == 0.0);
  EvalReport no_hits = f_score({0, 4, 7, 5});
  CHECK(no_hits.f_score == 0.0);
  EvalReport eq = f_score({6, 2, 1, 2});
  CHECK(eq.precision == eq.recall);
  CHECK(eq.f_score == doctest::Approx(eq.precision).epsilon(1e-15));
}

TEST_CASE("f_score against an exact rational recount") {
  Rng rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    ConfusionCounts c{rng.uniform_index(1000), rng.uniform_index(1000),
                      rng.uniform_index(1000), rng.uniform_index(1000)};
    if (trial % 10 == 0) c.tp = 0;
    ExactScores exact = exact_scores(c);
    // F reduces to 2tp / (2tp + fp + fn)
    CHECK(exact.f == Rational::make(2 * static_cast<__int128>(c.tp),
                                    2 * static_cast<__int128>(c.tp) + c.fp + c.fn));
    EvalReport r = f_score(c);
    CHECK(std::abs(r.precision - exact.precision.value()) < 1e-12);
    CHECK(std::abs(r.recall - exact.recall.value()) < 1e-12);
    CHECK(std::abs(r.f_score - exact.f.value()) < 1e-12);

    EvalReport swapped = f_score({c.tp, c.fn, c.tn, c.fp});
    CHECK(swapped.precision == r.recall);
    CHECK(swapped.recall == r.precision);
    CHECK(std::abs(swapped.f_score - r.f_score) < 1e-15);
  }
}

TEST_CASE("count_tokens") {
  CHECK(count_tokens(labels("OTTO"), labels("OTOO")) == ConfusionCounts{1, 0, 2, 1});
  CHECK_THROWS_AS(count_tokens(labels("OT"), labels("O")), LengthMismatch);
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = rng.uniform_index(30);
    auto gold = random_labels(rng, n), pred = random_labels(rng, n);
    ConfusionCounts c = count_tokens(gold, pred);
    CHECK(c.total() == n);
  }
}

TEST_CASE("stage reports") {
  std::vector<LabeledSentence> test = {labeled("OTTO"), labeled("OOO"), labeled("TO"),
                                       labeled("OO")};
  for (std::size_t k = 0; k < test.size(); ++k) test[k].sentence.doc_id = std::to_string(k);
  auto find = [&](const Sentence &s) -> const LabeledSentence & { return test[std::stoul(s.doc_id)]; };
  auto perfect_sentence = [&](const Sentence &s) { return find(s).sentence_label; };
  auto never = [](const Sentence &) { return SentenceLabel::NoTech; };
  auto gold_tags = [&](const Sentence &s) { return find(s).token_labels; };
  auto all_o = [](const Sentence &s) {
    return std::vector<TokenLabel>(s.tokens.size(), TokenLabel::O);
  };

  SUBCASE("stage I") {
    EvalReport perfect = evaluate_stage1(perfect_sentence, test);
    CHECK(perfect.f_score == 1.0);
    CHECK(perfect.counts.total() == test.size());
    CHECK(perfect.mode == EvalMode::kSentence);
    EvalReport none = evaluate_stage1(never, test);
    CHECK(none.precision == 0.0);
    CHECK(none.recall == 0.0);
    CHECK(none.f_score == 0.0);
  }
  SUBCASE("stage II counts tokens of gold positives only") {
    std::vector<LabeledSentence> one = {labeled("OTTO")};
    EvalReport r = evaluate_stage2([](const Sentence &) { return labels("OTOO"); }, one);
    CHECK(r.counts == ConfusionCounts{1, 0, 2, 1});
    EvalReport perfect = evaluate_stage2(gold_tags, test);
    CHECK(perfect.f_score == 1.0);
    CHECK(perfect.counts.total() == 6);  // OTTO + TO
    CHECK(perfect.mode == EvalMode::kToken);
  }
  SUBCASE("end to end") {
    EvalReport perfect = evaluate_end_to_end(perfect_sentence, gold_tags, test);
    EvalReport stage2 = evaluate_stage2(gold_tags, test);
    ConfusionCounts expect = stage2.counts;
    expect.tn += 5;  // tokens of the gold negatives
    CHECK(perfect.counts == expect);
    CHECK(perfect.counts.total() == 11);
    EvalReport gated = evaluate_end_to_end(never, gold_tags, test);
    CHECK(gated.recall == 0.0);
    CHECK(gated.counts.fn == 3);
    EvalReport lazy = evaluate_end_to_end(perfect_sentence, all_o, test);
    CHECK(lazy.counts == ConfusionCounts{0, 0, 8, 3});
  }
  SUBCASE("spans") {
    EvalReport exact = evaluate_spans(gold_tags, test);
    CHECK(exact.counts == ConfusionCounts{2, 0, 0, 0});
    std::vector<LabeledSentence> one = {labeled("OTTO")};
    EvalReport partial = evaluate_spans([](const Sentence &) { return labels("OTOT"); }, one);
    CHECK(partial.counts == ConfusionCounts{0, 2, 0, 1});
  }
}

TEST_CASE("end to end matches a per-token recount") {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    auto test = random_dataset(rng, 1 + rng.uniform_index(20));
    // predictions keyed by position in the dataset through the doc id
    std::vector<SentenceLabel> gate(test.size());
    std::vector<std::vector<TokenLabel>> tags(test.size());
    for (std::size_t k = 0; k < test.size(); ++k) {
      test[k].sentence.doc_id = std::to_string(k);
      gate[k] = rng.uniform_index(2) ? SentenceLabel::ContainsTech : SentenceLabel::NoTech;
      tags[k] = random_labels(rng, test[k].token_labels.size());
    }
    auto idx = [](const Sentence &s) { return std::stoul(s.doc_id); };
    EvalReport r = evaluate_end_to_end([&](const Sentence &s) { return gate[idx(s)]; },
                                       [&](const Sentence &s) { return tags[idx(s)]; }, test);
    ConfusionCounts oracle;
    for (std::size_t k = 0; k < test.size(); ++k)
      for (std::size_t i = 0; i < test[k].token_labels.size(); ++i) {
        bool g = test[k].token_labels[i] == TokenLabel::T;
        bool p = gate[k] == SentenceLabel::ContainsTech && tags[k][i] == TokenLabel::T;
        oracle.tp += g && p;
        oracle.fp += !g && p;
        oracle.fn += g && !p;
        oracle.tn += !g && !p;
      }
    CHECK(r.counts == oracle);
  }
}

TEST_CASE("report output") {
  EvalReport r = f_score({3, 1, 5, 3}, EvalMode::kEndToEnd);
  auto j = to_json(r);
  CHECK(j["mode"] == "end_to_end");
  CHECK(j["tp"] == 3);
  CHECK(j["tn"] == 5);
  CHECK(j["f_score"].get<double>() == doctest::Approx(0.6));
  for (const char *key : {"mode", "tp", "fp", "tn", "fn", "precision", "recall", "f_score"})
    CHECK(j.contains(key));
  CHECK(format_table(r).find("end_to_end") != std::string::npos);
  CHECK(parse_mode("span") == EvalMode::kSpan);
  CHECK_THROWS_AS(parse_mode("bogus"), ConfigError);
}
