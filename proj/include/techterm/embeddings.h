#ifndef TECHTERM_EMBEDDINGS_H_
#define TECHTERM_EMBEDDINGS_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "techterm/corpus.h"
#include "techterm/matrix.h"
#include "techterm/rng.h"

namespace techterm {

// Case-folded word list ordered by descending frequency, ties broken
// lexicographically, so ids are a pure function of the corpus.
inline constexpr std::int32_t kOutOfVocabulary = -1;

class Vocabulary {
 public:
  Vocabulary() = default;

  // Throws ConfigError for min_count < 1 and EmptyVocabulary when nothing
  // survives the threshold.
  static Vocabulary build(const std::vector<Sentence> &corpus,
                          std::uint64_t min_count);

  // Words are taken in the given order; counts parallel to words.
  static Vocabulary from_words(std::vector<std::string> words,
                               std::vector<std::uint64_t> counts,
                               std::uint64_t min_count = 1);

  std::size_t size() const { return words_.size(); }
  std::optional<std::int32_t> find(std::string_view folded_word) const;
  const std::string &word(std::size_t id) const { return words_[id]; }
  std::uint64_t count(std::size_t id) const { return counts_[id]; }
  std::uint64_t min_count() const { return min_count_; }
  const std::vector<std::string> &words() const { return words_; }
  const std::vector<std::uint64_t> &counts() const { return counts_; }

  // One id per token after case folding; kOutOfVocabulary for unknown
  // words so positions are preserved.
  std::vector<std::int32_t> encode(const Sentence &sentence) const;

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, std::int32_t> index_;
  std::uint64_t min_count_ = 1;
};

// (center, context) word id pairs for every in-vocabulary position and
// every in-vocabulary neighbour within `window` positions. Negative ids
// mark out-of-vocabulary positions.
std::vector<std::pair<std::int32_t, std::int32_t>> generate_pairs(
    std::span<const std::int32_t> ids, std::size_t window);
std::vector<std::pair<std::int32_t, std::int32_t>> generate_pairs(
    const Sentence &sentence, const Vocabulary &vocab, std::size_t window);

// Draws word ids from the unigram distribution raised to `power`.
class NegativeSampler {
 public:
  NegativeSampler(std::span<const std::uint64_t> counts, double power = 0.75);

  std::int32_t draw(Rng &rng) const;
  double probability(std::size_t id) const;
  std::size_t size() const { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
};

// Objective of one skipgram pair with k negatives:
//   log sigma(u_ctx . v) + sum_k log sigma(-u_neg_k . v)
// and its gradient. Training ascends this objective.
struct PairGradient {
  std::vector<double> center;                 // d/dv
  std::vector<double> context;                // d/du_ctx
  std::vector<std::vector<double>> negatives;  // d/du_neg_k
};

double pair_objective(std::span<const double> center,
                      std::span<const double> context,
                      const std::vector<std::span<const double>> &negatives);

PairGradient pair_gradient(std::span<const double> center,
                           std::span<const double> context,
                           const std::vector<std::span<const double>> &negatives);

struct SkipgramConfig {
  std::size_t dim = 300;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  std::uint64_t min_count = 1;
  std::uint64_t seed = 1;
  // 1 trains deterministically. More workers apply lock-free updates and
  // are not reproducible.
  std::size_t threads = 1;
};

class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  EmbeddingModel(Vocabulary vocab, Matrix input, Matrix output);

  std::size_t dim() const { return input_.cols; }
  const Vocabulary &vocab() const { return vocab_; }
  const Matrix &input_vectors() const { return input_; }
  const Matrix &output_vectors() const { return output_; }
  Matrix &mutable_input_vectors() { return input_; }
  Matrix &mutable_output_vectors() { return output_; }

  // Input vector of a word, looked up after case folding.
  std::optional<std::span<const double>> vector(std::string_view word) const;

  void save(std::ostream &out) const;
  void save_file(const std::string &path) const;
  // Validates magic, version and dimensions. Throws FormatError.
  static EmbeddingModel load(std::istream &in);
  static EmbeddingModel load_file(const std::string &path);

  // Plain "word v1 ... vdim" lines, one word per line. Output vectors are
  // zero. Intended for tests and hand-built fixtures.
  static EmbeddingModel import_text(std::istream &in);

 private:
  Vocabulary vocab_;
  Matrix input_;
  Matrix output_;
};

// Input vectors uniform in [-0.5/dim, 0.5/dim], output vectors zero.
EmbeddingModel init_skipgram(Vocabulary vocab, std::size_t dim,
                             std::uint64_t seed);

// Throws ConfigError for non-positive hyperparameters (epochs may be 0).
EmbeddingModel train_skipgram(const std::vector<Sentence> &corpus,
                              const SkipgramConfig &config);

struct SentenceVector {
  std::vector<double> values;
  std::size_t contributing_count = 0;
};

// Mean of the input vectors of in-vocabulary tokens; the zero vector when
// no token is known.
SentenceVector embed_sentence(const EmbeddingModel &model,
                              const Sentence &sentence);

double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace techterm

#endif  // TECHTERM_EMBEDDINGS_H_
