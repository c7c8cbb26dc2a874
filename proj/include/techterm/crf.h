#ifndef TECHTERM_CRF_H_
#define TECHTERM_CRF_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "techterm/corpus.h"
#include "techterm/features.h"
#include "techterm/matrix.h"

namespace techterm {

// Labels are indexed by TokenLabel: T = 0, O = 1. Transition rows are the
// previous state: BOS, T, O.
inline constexpr int kNumLabels = 2;
inline constexpr int kBosRow = 0;
inline constexpr int kNumPrevStates = 3;

inline int label_index(TokenLabel label) { return static_cast<int>(label); }
inline int prev_row(TokenLabel label) { return 1 + static_cast<int>(label); }

using FeatureIds = std::vector<std::int32_t>;
using SequenceFeatures = std::vector<FeatureIds>;

struct CrfModel {
  FeatureIndex feature_index;  // frozen
  Matrix emission;             // features x labels
  Matrix transition{kNumPrevStates, kNumLabels};
  double l2 = 1.0;

  static CrfModel zeros(FeatureIndex index, double l2 = 1.0);

  std::size_t num_features() const { return emission.rows; }
  SequenceFeatures encode(const std::vector<SparseFeatures> &features) const;
  bool all_finite() const { return emission.all_finite() && transition.all_finite(); }

  void save(std::ostream &out) const;
  void save_file(const std::string &path) const;
  // Validates magic, version, label order and dimensions.
  static CrfModel load(std::istream &in);
  static CrfModel load_file(const std::string &path);
};

// log phi_i(prev, cur). At i = 0 only the BOS row is used; later positions
// use the T and O rows.
struct PotentialTable {
  std::vector<std::array<std::array<double, kNumLabels>, kNumPrevStates>> log_phi;

  std::size_t size() const { return log_phi.size(); }
  double operator()(std::size_t i, int prev, int cur) const {
    return log_phi[i][prev][cur];
  }
};

// Feature ids outside the model are ignored.
PotentialTable potentials(const CrfModel &model, const SequenceFeatures &features);
PotentialTable potentials(const CrfModel &model,
                          const std::vector<SparseFeatures> &features);

double log_partition(const PotentialTable &table);

// Unnormalized log score of one label sequence. Throws LengthMismatch.
double sequence_score(const PotentialTable &table,
                      const std::vector<TokenLabel> &labels);

double sequence_log_prob(const PotentialTable &table,
                         const std::vector<TokenLabel> &labels);

// Highest-scoring sequence. Among equal scores the sequence with O at the
// earliest differing position wins.
std::vector<TokenLabel> viterbi(const PotentialTable &table);
std::vector<TokenLabel> viterbi(const CrfModel &model, const SequenceFeatures &features);

struct Marginals {
  std::vector<std::array<double, kNumLabels>> node;
  // edge[i][prev][cur] for i >= 1; edge[0] is zero.
  std::vector<std::array<std::array<double, kNumLabels>, kNumLabels>> edge;
  double log_z = 0.0;
};

Marginals marginals(const PotentialTable &table);

struct CrfExample {
  SequenceFeatures features;
  std::vector<TokenLabel> labels;
};

// sum_n log p(gold_n) - (l2/2) * |w|^2 over emission and transition weights.
double crf_objective(const CrfModel &model, const std::vector<CrfExample> &data,
                     double l2);

struct CrfGradient {
  Matrix emission;
  Matrix transition;
  double objective = 0.0;
};

// Gradient of crf_objective: observed minus expected counts minus l2 * w.
// Sequences are reduced in fixed chunks in dataset order, so the result
// does not depend on `threads`.
CrfGradient crf_gradient(const CrfModel &model, const std::vector<CrfExample> &data,
                         double l2, std::size_t threads = 1);

struct CrfTrainConfig {
  std::size_t epochs = 300;
  double learning_rate = 3e-4;
  double l2 = 1.0;
  // Batch ascent draws no random numbers; kept for a uniform config surface.
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

struct CrfTrainingLog {
  // Regularized negative log-likelihood before every update and after the
  // last one.
  std::vector<double> negative_log_likelihood;
};

// Batch gradient ascent from zero weights. Throws ConfigError, and
// NumericError when the weights stop being finite.
CrfModel train_crf(FeatureIndex index, const std::vector<CrfExample> &data,
                   const CrfTrainConfig &config, CrfTrainingLog *log = nullptr);

}  // namespace techterm

#endif  // TECHTERM_CRF_H_
