#ifndef TECHTERM_SYNTH_H_
#define TECHTERM_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "techterm/corpus.h"

namespace techterm {

struct SynthConfig {
  std::size_t sentences = 1000;
  std::uint64_t seed = 1;
  double positive_fraction = 0.5;
  std::size_t sentences_per_document = 8;
};

struct SynthCorpus {
  std::vector<Document> documents;
  // Gold labels by construction; token offsets refer to the document text.
  std::vector<LabeledSentence> gold;
};

// Template sentences embedding gazetteer terms, mixed with distractor
// sentences that contain none. Filler phrases sharing a token with any
// gazetteer entry are dropped, so annotating the output reproduces the
// gold labels. Throws ConfigError.
SynthCorpus synthesize(const Gazetteer &gazetteer, const SynthConfig &config);

}  // namespace techterm

#endif  // TECHTERM_SYNTH_H_
