#ifndef TECHTERM_FEATURES_H_
#define TECHTERM_FEATURES_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "techterm/corpus.h"

namespace techterm {

enum class CoarsePosTag : std::uint8_t { CAP, LOWER, MIXED, NUM, PUNCT, SYM };

const char *tag_name(CoarsePosTag tag);

// Character classes X (upper), x (lower), d (digit), s (other) with runs
// collapsed: "TensorFlow" -> "XxXx".
std::string word_shape(std::string_view token);

// Distinct n-grams of "<" + lowercased token + ">" for n in [n_min, n_max],
// counted in code points. Returned sorted.
std::vector<std::string> char_ngrams(std::string_view token, std::size_t n_min = 2,
                                     std::size_t n_max = 4);

CoarsePosTag classify_token(std::string_view token);

// Part-of-speech source for the tag templates.
class PosTagger {
 public:
  virtual ~PosTagger() = default;
  virtual std::vector<CoarsePosTag> tag(const Sentence &sentence) const = 0;
};

// Deterministic orthographic surrogate; see classify_token.
class OrthographicTagger : public PosTagger {
 public:
  std::vector<CoarsePosTag> tag(const Sentence &sentence) const override;
};

std::vector<CoarsePosTag> pos_tag(const Sentence &sentence);

struct FeatureConfig {
  std::size_t ngram_min = 2;
  std::size_t ngram_max = 4;
  std::size_t window = 4;
};

// Sorted, duplicate-free "TEMPLATE=value" strings fired at one position.
struct SparseFeatures {
  std::vector<std::string> fired;

  bool contains(std::string_view feature) const;
};

// Throws PositionOutOfRange for i >= sentence length and LengthMismatch if
// tags do not cover the sentence.
SparseFeatures extract_features(const Sentence &sentence,
                                const std::vector<CoarsePosTag> &tags,
                                std::size_t i, const FeatureConfig &config = {});

std::vector<SparseFeatures> sentence_features(const Sentence &sentence,
                                              const PosTagger &tagger,
                                              const FeatureConfig &config = {});

// Feature string to dense id map. Mutable while building; after freeze()
// unknown strings map to nothing.
class FeatureIndex {
 public:
  // Returns the id, adding the feature when the index is not frozen.
  std::optional<std::int32_t> add(std::string_view feature);
  std::optional<std::int32_t> lookup(std::string_view feature) const;

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  std::size_t size() const { return names_.size(); }
  const std::string &name(std::size_t id) const { return names_[id]; }
  const std::vector<std::string> &names() const { return names_; }

  // Frozen index over features seen at least min_count times, with ids in
  // order of first appearance.
  static FeatureIndex build(const std::vector<std::vector<SparseFeatures>> &data,
                            std::size_t min_count = 2);
  static FeatureIndex from_names(std::vector<std::string> names);

  // Ids of the known features, in the order they appear in `features`.
  std::vector<std::int32_t> encode(const SparseFeatures &features) const;

 private:
  std::unordered_map<std::string, std::int32_t> ids_;
  std::vector<std::string> names_;
  bool frozen_ = false;
};

}  // namespace techterm

#endif  // TECHTERM_FEATURES_H_
