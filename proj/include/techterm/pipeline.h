#ifndef TECHTERM_PIPELINE_H_
#define TECHTERM_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "techterm/cascade.h"
#include "techterm/classifier.h"
#include "techterm/corpus.h"
#include "techterm/crf.h"
#include "techterm/embeddings.h"
#include "techterm/features.h"
#include "techterm/metrics.h"
#include "techterm/synth.h"

namespace techterm {

struct RunConfig {
  std::uint64_t seed = 42;
  std::string corpus;     // JSON-lines; empty means synthesize
  std::string gazetteer;
  std::string out_dir = "techterm-out";
  std::size_t synth_sentences = 2000;
  SplitRatios ratios;
  SkipgramConfig embeddings;
  ClassifierConfig classifier;
  CrfTrainConfig crf;
  FeatureConfig features;
  std::size_t feature_min_count = 2;
};

// Pipeline defaults tuned for desk-scale corpora.
RunConfig default_run_config();

// Flat key = value lines grouped under [section] headers, e.g.
//   seed = 7
//   [embeddings]
//   dim = 100
// Keys outside a section belong to the general section. Throws
// ConfigError with the line number for unknown keys or bad values.
void apply_config(std::istream &in, RunConfig &config);
void apply_config_file(const std::string &path, RunConfig &config);
// One "section.key=value" override, as given on the command line.
void apply_override(const std::string &assignment, RunConfig &config);
// Checks ratios and hyperparameters. Throws ConfigError or RatioError.
void validate(const RunConfig &config);

std::vector<Sentence> sentences_of(const std::vector<LabeledSentence> &data);

std::vector<ClassifierExample> classifier_examples(
    const EmbeddingModel &embeddings, const std::vector<LabeledSentence> &data);

// Features of the gold-positive sentences, indexed with pruning, ready for
// train_crf.
struct CrfDataset {
  FeatureIndex index;
  std::vector<CrfExample> examples;
};
CrfDataset crf_dataset(const std::vector<LabeledSentence> &data,
                       const FeatureConfig &features, std::size_t min_count);

struct PipelineResult {
  ClassCounts before_balance;
  ClassCounts after_balance;
  std::size_t train_size = 0;
  std::size_t validation_size = 0;
  std::size_t test_size = 0;
  EvalReport stage1;
  EvalReport stage2;
  EvalReport end_to_end;
  EvalReport spans;
  // End-to-end counts with stage I replaced by the gold sentence label.
  EvalReport gold_gated;
  std::vector<double> crf_nll;
  double seconds = 0.0;
};

// synth (when no corpus is given) -> annotate -> balance -> split ->
// train embeddings, classifier and CRF -> evaluate on the test split.
// Artifacts are written to config.out_dir.
PipelineResult run_pipeline(const RunConfig &config, std::ostream &log);

}  // namespace techterm

#endif  // TECHTERM_PIPELINE_H_
