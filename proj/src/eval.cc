#include "techterm/eval.h"

#include <set>
#include <utility>

#include "techterm/error.h"

namespace techterm {

namespace {

SentencePredictor stage1_of(const Cascade &cascade) {
  return [&cascade](const Sentence &s) { return cascade.classify(s).label; };
}

SequencePredictor stage2_of(const Cascade &cascade) {
  return [&cascade](const Sentence &s) { return cascade.tag(s); };
}

}  // namespace

ConfusionCounts count_tokens(const std::vector<TokenLabel> &gold,
                             const std::vector<TokenLabel> &predicted) {
  if (gold.size() != predicted.size()) {
    throw LengthMismatch("gold and predicted label sequences differ in length");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    bool g = gold[i] == TokenLabel::T;
    bool p = predicted[i] == TokenLabel::T;
    if (g && p) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  return c;
}

EvalReport evaluate_stage1(const SentencePredictor &predict,
                           const std::vector<LabeledSentence> &test) {
  ConfusionCounts c;
  for (const auto &ls : test) {
    bool g = ls.sentence_label == SentenceLabel::ContainsTech;
    bool p = predict(ls.sentence) == SentenceLabel::ContainsTech;
    if (g && p) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  return f_score(c, EvalMode::kSentence);
}

EvalReport evaluate_stage1(const Cascade &cascade,
                           const std::vector<LabeledSentence> &test) {
  return evaluate_stage1(stage1_of(cascade), test);
}

EvalReport evaluate_stage2(const SequencePredictor &tag,
                           const std::vector<LabeledSentence> &test) {
  ConfusionCounts c;
  for (const auto &ls : test) {
    if (ls.sentence_label != SentenceLabel::ContainsTech) continue;
    c += count_tokens(ls.token_labels, tag(ls.sentence));
  }
  return f_score(c, EvalMode::kToken);
}

EvalReport evaluate_stage2(const Cascade &cascade,
                           const std::vector<LabeledSentence> &test) {
  return evaluate_stage2(stage2_of(cascade), test);
}

EvalReport evaluate_end_to_end(const SentencePredictor &predict,
                               const SequencePredictor &tag,
                               const std::vector<LabeledSentence> &test) {
  ConfusionCounts c;
  for (const auto &ls : test) {
    if (predict(ls.sentence) == SentenceLabel::ContainsTech) {
      c += count_tokens(ls.token_labels, tag(ls.sentence));
    } else {
      c += count_tokens(ls.token_labels,
                        std::vector<TokenLabel>(ls.token_labels.size(), TokenLabel::O));
    }
  }
  return f_score(c, EvalMode::kEndToEnd);
}

EvalReport evaluate_end_to_end(const Cascade &cascade,
                               const std::vector<LabeledSentence> &test) {
  return evaluate_end_to_end(stage1_of(cascade), stage2_of(cascade), test);
}

EvalReport evaluate_spans(const SequencePredictor &tag,
                          const std::vector<LabeledSentence> &test) {
  ConfusionCounts c;
  for (const auto &ls : test) {
    if (ls.sentence_label != SentenceLabel::ContainsTech) continue;
    auto key = [](const TermSpan &s) { return std::make_pair(s.start_token, s.end_token); };
    std::set<std::pair<std::size_t, std::size_t>> gold, predicted;
    for (const auto &s : spans_from_labels(ls.sentence.tokens, ls.token_labels)) {
      gold.insert(key(s));
    }
    for (const auto &s : spans_from_labels(ls.sentence.tokens, tag(ls.sentence))) {
      predicted.insert(key(s));
    }
    for (const auto &p : predicted) {
      if (gold.count(p)) ++c.tp;
      else ++c.fp;
    }
    for (const auto &g : gold) {
      if (!predicted.count(g)) ++c.fn;
    }
  }
  return f_score(c, EvalMode::kSpan);
}

EvalReport evaluate_spans(const Cascade &cascade,
                          const std::vector<LabeledSentence> &test) {
  return evaluate_spans(stage2_of(cascade), test);
}

}  // namespace techterm
