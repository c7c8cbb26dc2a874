#ifndef TECHTERM_EVAL_H_
#define TECHTERM_EVAL_H_

#include <functional>
#include <vector>

#include "techterm/cascade.h"
#include "techterm/corpus.h"
#include "techterm/metrics.h"

namespace techterm {

using SentencePredictor = std::function<SentenceLabel(const Sentence &)>;
using SequencePredictor = std::function<std::vector<TokenLabel>(const Sentence &)>;

// Positive class is T. Throws LengthMismatch.
ConfusionCounts count_tokens(const std::vector<TokenLabel> &gold,
                             const std::vector<TokenLabel> &predicted);

// Sentence-level counts with ContainsTech as the positive class.
EvalReport evaluate_stage1(const SentencePredictor &predict,
                           const std::vector<LabeledSentence> &test);
EvalReport evaluate_stage1(const Cascade &cascade,
                           const std::vector<LabeledSentence> &test);

// Token-level counts over the gold-positive sentences of `test`.
EvalReport evaluate_stage2(const SequencePredictor &tag,
                           const std::vector<LabeledSentence> &test);
EvalReport evaluate_stage2(const Cascade &cascade,
                           const std::vector<LabeledSentence> &test);

// Token-level counts over every sentence with stage I gating stage II;
// sentences gated out predict O for every token.
EvalReport evaluate_end_to_end(const SentencePredictor &predict,
                               const SequencePredictor &tag,
                               const std::vector<LabeledSentence> &test);
EvalReport evaluate_end_to_end(const Cascade &cascade,
                               const std::vector<LabeledSentence> &test);

// Exact span matches over the gold-positive sentences; tn is always 0.
EvalReport evaluate_spans(const SequencePredictor &tag,
                          const std::vector<LabeledSentence> &test);
EvalReport evaluate_spans(const Cascade &cascade,
                          const std::vector<LabeledSentence> &test);

}  // namespace techterm

#endif  // TECHTERM_EVAL_H_
