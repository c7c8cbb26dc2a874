#include "techterm/cascade.h"

#include "techterm/error.h"

namespace techterm {

std::vector<TermSpan> spans_from_labels(const std::vector<Token> &tokens,
                                        const std::vector<TokenLabel> &labels) {
  if (tokens.size() != labels.size()) {
    throw LengthMismatch("spans_from_labels: " + std::to_string(tokens.size()) +
                         " tokens, " + std::to_string(labels.size()) + " labels");
  }
  std::vector<TermSpan> spans;
  std::size_t i = 0;
  while (i < labels.size()) {
    if (labels[i] != TokenLabel::T) {
      ++i;
      continue;
    }
    TermSpan span;
    span.start_token = i;
    span.start_byte = tokens[i].start;
    while (i < labels.size() && labels[i] == TokenLabel::T) {
      if (i > span.start_token) span.text += ' ';
      span.text += tokens[i].text;
      ++i;
    }
    span.end_token = i - 1;
    span.end_byte = tokens[i - 1].end;
    spans.push_back(std::move(span));
  }
  return spans;
}

Cascade::Cascade(std::shared_ptr<const PipelineModels> models,
                 std::shared_ptr<const PosTagger> tagger)
    : models_(std::move(models)), tagger_(std::move(tagger)) {
  if (!models_) throw ModelMismatch("cascade needs models");
  if (models_->classifier.input_dim != models_->embeddings.dim()) {
    throw ModelMismatch("classifier input dimension " +
                        std::to_string(models_->classifier.input_dim) +
                        " != embedding dimension " +
                        std::to_string(models_->embeddings.dim()));
  }
  if (!tagger_) tagger_ = std::make_shared<OrthographicTagger>();
}

Prediction Cascade::classify(const Sentence &sentence) const {
  SentenceVector v = embed_sentence(models_->embeddings, sentence);
  return predict(models_->classifier, v.values);
}

std::vector<TokenLabel> Cascade::tag(const Sentence &sentence) const {
  stage2_calls_.fetch_add(1, std::memory_order_relaxed);
  auto features = sentence_features(sentence, *tagger_, models_->features);
  return viterbi(models_->crf, models_->crf.encode(features));
}

Extraction Cascade::extract_sentence(const Sentence &sentence) const {
  Extraction ex;
  ex.doc_id = sentence.doc_id;
  ex.sentence_index = sentence.index;
  ex.sentence_positive = classify(sentence).label == SentenceLabel::ContainsTech;
  if (ex.sentence_positive && !sentence.tokens.empty()) {
    ex.token_labels = tag(sentence);
    ex.spans = spans_from_labels(sentence.tokens, ex.token_labels);
  }
  return ex;
}

std::vector<Extraction> Cascade::extract_from_sentences(
    const std::vector<Sentence> &sentences) const {
  std::vector<Extraction> out;
  out.reserve(sentences.size());
  for (const auto &s : sentences) out.push_back(extract_sentence(s));
  return out;
}

std::vector<Extraction> Cascade::extract_from_document(const Document &doc) const {
  return extract_from_sentences(split_sentences(doc.text, doc.id));
}

nlohmann::json to_json(const Extraction &ex) {
  nlohmann::json spans = nlohmann::json::array();
  for (const auto &s : ex.spans) {
    spans.push_back(
        {{"start_token", s.start_token}, {"end_token", s.end_token}, {"text", s.text}});
  }
  return {{"doc_id", ex.doc_id},
          {"sentence_index", ex.sentence_index},
          {"positive", ex.sentence_positive},
          {"spans", spans}};
}

void write_extractions_jsonl(std::ostream &out,
                             const std::vector<Extraction> &extractions) {
  for (const auto &ex : extractions) out << to_json(ex).dump() << '\n';
}

}  // namespace techterm
