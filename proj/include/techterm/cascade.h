#ifndef TECHTERM_CASCADE_H_
#define TECHTERM_CASCADE_H_

#include <atomic>
#include <cstddef>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "techterm/classifier.h"
#include "techterm/corpus.h"
#include "techterm/crf.h"
#include "techterm/embeddings.h"
#include "techterm/features.h"

namespace techterm {

struct TermSpan {
  std::size_t start_token = 0;
  std::size_t end_token = 0;  // inclusive
  std::string text;
  // Byte range in the source the tokens came from.
  std::size_t start_byte = 0;
  std::size_t end_byte = 0;

  bool operator==(const TermSpan &) const = default;
};

// Maximal runs of T. Span text joins token texts with single spaces.
// Throws LengthMismatch.
std::vector<TermSpan> spans_from_labels(const std::vector<Token> &tokens,
                                        const std::vector<TokenLabel> &labels);

struct Extraction {
  std::string doc_id;
  std::size_t sentence_index = 0;
  bool sentence_positive = false;
  std::vector<TermSpan> spans;
  // Stage II labels; empty when stage II was skipped.
  std::vector<TokenLabel> token_labels;
};

struct PipelineModels {
  EmbeddingModel embeddings;
  ClassifierModel classifier;
  CrfModel crf;
  FeatureConfig features;
};

// Runs stage I on every sentence and stage II only on sentences stage I
// predicts positive. Models are immutable; extraction is safe to call
// concurrently.
class Cascade {
 public:
  // Throws ModelMismatch when the classifier input dimension differs from
  // the embedding dimension.
  explicit Cascade(std::shared_ptr<const PipelineModels> models,
                   std::shared_ptr<const PosTagger> tagger = nullptr);

  Prediction classify(const Sentence &sentence) const;
  // Stage II alone.
  std::vector<TokenLabel> tag(const Sentence &sentence) const;

  Extraction extract_sentence(const Sentence &sentence) const;
  std::vector<Extraction> extract_from_document(const Document &doc) const;
  std::vector<Extraction> extract_from_sentences(
      const std::vector<Sentence> &sentences) const;

  std::size_t stage2_invocations() const { return stage2_calls_.load(); }
  const PipelineModels &models() const { return *models_; }

 private:
  std::shared_ptr<const PipelineModels> models_;
  std::shared_ptr<const PosTagger> tagger_;
  mutable std::atomic<std::size_t> stage2_calls_{0};
};

nlohmann::json to_json(const Extraction &extraction);
void write_extractions_jsonl(std::ostream &out,
                             const std::vector<Extraction> &extractions);

}  // namespace techterm

#endif  // TECHTERM_CASCADE_H_
