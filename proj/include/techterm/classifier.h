#ifndef TECHTERM_CLASSIFIER_H_
#define TECHTERM_CLASSIFIER_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "techterm/corpus.h"
#include "techterm/matrix.h"

namespace techterm {

// Softmax classifier over sentence vectors: logits = B * A * x + bias.
// A is a fixed identity unless use_hidden is set.
struct ClassifierModel {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  bool use_hidden = false;
  Matrix hidden;                  // hidden_dim x input_dim (A)
  Matrix output;                  // 2 x hidden_dim (B)
  std::array<double, 2> bias{};   // indexed by SentenceLabel

  // All-zero output weights and bias with identity A.
  static ClassifierModel zeros(std::size_t input_dim);

  std::array<double, 2> logits(std::span<const double> x) const;
  bool all_finite() const;

  void save(std::ostream &out) const;
  void save_file(const std::string &path) const;
  static ClassifierModel load(std::istream &in);
  static ClassifierModel load_file(const std::string &path);
};

struct Prediction {
  SentenceLabel label = SentenceLabel::NoTech;
  std::array<double, 2> probabilities{};
};

struct ClassifierExample {
  std::vector<double> features;
  SentenceLabel label = SentenceLabel::NoTech;
};

std::array<double, 2> softmax(const std::array<double, 2> &logits);

// Argmax with ties going to NoTech. Throws DimensionMismatch.
Prediction predict(const ClassifierModel &model, std::span<const double> x);

// Mean negative log-likelihood over the batch. Throws DimensionMismatch and
// ConfigError for an empty batch.
double loss(const ClassifierModel &model, std::span<const ClassifierExample> batch);

// loss + (l2/2) * (|B|^2 + |A|^2 when A is trained). The bias is not
// regularized.
double objective(const ClassifierModel &model,
                 std::span<const ClassifierExample> batch, double l2);

struct ClassifierGradient {
  Matrix hidden;  // empty unless use_hidden
  Matrix output;
  std::array<double, 2> bias{};
};

ClassifierGradient gradient(const ClassifierModel &model,
                            std::span<const ClassifierExample> batch, double l2);

struct ClassifierConfig {
  std::size_t epochs = 50;
  double learning_rate = 0.1;
  double l2 = 0.0;
  std::uint64_t seed = 1;
  bool use_hidden = false;
  std::size_t hidden_dim = 0;  // 0 means input_dim
  std::size_t batch_size = 32;  // 0 means full batch
};

struct ClassifierTrainingLog {
  // Training objective before the first epoch and after every epoch.
  std::vector<double> objective;
  std::vector<double> validation_f;
  std::size_t best_epoch = 0;  // 0 is the initialization
};

ClassifierModel init_classifier(std::size_t input_dim, const ClassifierConfig &config);

// Mini-batch SGD on the regularized objective. Returns the parameters of the
// epoch with the best validation F-score (earliest on ties); with an empty
// validation set the last epoch wins. Throws ConfigError.
ClassifierModel train_classifier(std::span<const ClassifierExample> train,
                                 std::span<const ClassifierExample> validation,
                                 const ClassifierConfig &config,
                                 ClassifierTrainingLog *log = nullptr);

}  // namespace techterm

#endif  // TECHTERM_CLASSIFIER_H_
