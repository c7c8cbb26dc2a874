#include "techterm/crf.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "techterm/binary_io.h"
#include "techterm/error.h"

namespace techterm {

namespace {

constexpr std::string_view kMagic = "TTCRFMD1";
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kChunk = 32;

double lse2(double a, double b) {
  double m = std::max(a, b);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

using Column = std::array<double, kNumLabels>;

std::vector<Column> forward(const PotentialTable &t) {
  std::vector<Column> alpha(t.size());
  if (t.size() == 0) return alpha;
  for (int c = 0; c < kNumLabels; ++c) alpha[0][c] = t(0, kBosRow, c);
  for (std::size_t i = 1; i < t.size(); ++i) {
    for (int c = 0; c < kNumLabels; ++c) {
      alpha[i][c] = lse2(alpha[i - 1][0] + t(i, 1, c), alpha[i - 1][1] + t(i, 2, c));
    }
  }
  return alpha;
}

std::vector<Column> backward(const PotentialTable &t) {
  std::vector<Column> beta(t.size(), Column{0.0, 0.0});
  for (std::size_t i = t.size(); i-- > 1;) {
    for (int p = 0; p < kNumLabels; ++p) {
      beta[i - 1][p] = lse2(t(i, 1 + p, 0) + beta[i][0], t(i, 1 + p, 1) + beta[i][1]);
    }
  }
  return beta;
}

void check_length(const PotentialTable &t, const std::vector<TokenLabel> &labels) {
  if (labels.size() != t.size()) {
    throw LengthMismatch("label sequence length " + std::to_string(labels.size()) +
                         " != table length " + std::to_string(t.size()));
  }
}

}  // namespace

CrfModel CrfModel::zeros(FeatureIndex index, double l2) {
  CrfModel m;
  index.freeze();
  m.emission = Matrix(index.size(), kNumLabels);
  m.feature_index = std::move(index);
  m.l2 = l2;
  return m;
}

SequenceFeatures CrfModel::encode(const std::vector<SparseFeatures> &features) const {
  SequenceFeatures out;
  out.reserve(features.size());
  for (const auto &f : features) out.push_back(feature_index.encode(f));
  return out;
}

void CrfModel::save(std::ostream &out) const {
  binio::write_magic(out, kMagic);
  binio::write_u32(out, kVersion);
  binio::write_u32(out, kNumLabels);
  binio::write_string(out, "T");
  binio::write_string(out, "O");
  binio::write_f64(out, l2);
  binio::write_u32(out, static_cast<std::uint32_t>(feature_index.size()));
  for (const auto &name : feature_index.names()) binio::write_string(out, name);
  binio::write_f64s(out, emission.data);
  binio::write_f64s(out, transition.data);
}

void CrfModel::save_file(const std::string &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  save(out);
}

CrfModel CrfModel::load(std::istream &in) {
  binio::expect_magic(in, kMagic);
  binio::expect_version(in, kVersion);
  if (binio::read_u32(in) != kNumLabels || binio::read_string(in) != "T" ||
      binio::read_string(in) != "O") {
    throw FormatError("CRF model label order must be (T, O)");
  }
  double l2 = binio::read_f64(in);
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw FormatError("CRF model l2 invalid");
  std::uint32_t num_features = binio::read_u32(in);
  std::vector<std::string> names(num_features);
  for (auto &n : names) n = binio::read_string(in);
  CrfModel m = zeros(FeatureIndex::from_names(std::move(names)), l2);
  m.emission.data = binio::read_f64s(in, m.emission.data.size());
  m.transition.data = binio::read_f64s(in, m.transition.data.size());
  if (!m.all_finite()) throw FormatError("CRF weights are not finite");
  return m;
}

CrfModel CrfModel::load_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open CRF model '" + path + "'");
  return load(in);
}

PotentialTable potentials(const CrfModel &model, const SequenceFeatures &features) {
  PotentialTable t;
  t.log_phi.resize(features.size());
  const auto num_features = static_cast<std::int32_t>(model.num_features());
  for (std::size_t i = 0; i < features.size(); ++i) {
    Column node{0.0, 0.0};
    for (std::int32_t f : features[i]) {
      if (f < 0 || f >= num_features) continue;
      node[0] += model.emission(f, 0);
      node[1] += model.emission(f, 1);
    }
    for (int prev = 0; prev < kNumPrevStates; ++prev) {
      for (int c = 0; c < kNumLabels; ++c) {
        t.log_phi[i][prev][c] = model.transition(prev, c) + node[c];
      }
    }
  }
  return t;
}

PotentialTable potentials(const CrfModel &model,
                          const std::vector<SparseFeatures> &features) {
  return potentials(model, model.encode(features));
}

double log_partition(const PotentialTable &table) {
  if (table.size() == 0) return 0.0;
  const std::vector<Column> alpha = forward(table);
  const Column &last = alpha.back();
  return lse2(last[0], last[1]);
}

double sequence_score(const PotentialTable &table,
                      const std::vector<TokenLabel> &labels) {
  check_length(table, labels);
  double score = 0.0;
  int prev = kBosRow;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    score += table(i, prev, label_index(labels[i]));
    prev = prev_row(labels[i]);
  }
  return score;
}

double sequence_log_prob(const PotentialTable &table,
                         const std::vector<TokenLabel> &labels) {
  return sequence_score(table, labels) - log_partition(table);
}

std::vector<TokenLabel> viterbi(const PotentialTable &t) {
  const std::size_t n = t.size();
  std::vector<TokenLabel> out(n, TokenLabel::O);
  if (n == 0) return out;
  // best[i][c]: maximum score of positions i+1.. given label c at i.
  std::vector<Column> best(n, Column{0.0, 0.0});
  for (std::size_t i = n; i-- > 1;) {
    for (int p = 0; p < kNumLabels; ++p) {
      best[i - 1][p] = std::max(t(i, 1 + p, 0) + best[i][0], t(i, 1 + p, 1) + best[i][1]);
    }
  }
  // Decode left to right; O wins ties at each position.
  const int o = label_index(TokenLabel::O);
  const int tt = label_index(TokenLabel::T);
  int prev = kBosRow;
  for (std::size_t i = 0; i < n; ++i) {
    double score_t = t(i, prev, tt) + best[i][tt];
    double score_o = t(i, prev, o) + best[i][o];
    out[i] = score_t > score_o ? TokenLabel::T : TokenLabel::O;
    prev = prev_row(out[i]);
  }
  return out;
}

std::vector<TokenLabel> viterbi(const CrfModel &model, const SequenceFeatures &features) {
  return viterbi(potentials(model, features));
}

Marginals marginals(const PotentialTable &t) {
  Marginals m;
  const std::size_t n = t.size();
  m.node.assign(n, Column{0.0, 0.0});
  m.edge.assign(n, {});
  if (n == 0) return m;
  std::vector<Column> alpha = forward(t);
  std::vector<Column> beta = backward(t);
  m.log_z = lse2(alpha[n - 1][0], alpha[n - 1][1]);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < kNumLabels; ++c) {
      m.node[i][c] = std::exp(alpha[i][c] + beta[i][c] - m.log_z);
    }
    if (i == 0) continue;
    for (int p = 0; p < kNumLabels; ++p) {
      for (int c = 0; c < kNumLabels; ++c) {
        m.edge[i][p][c] =
            std::exp(alpha[i - 1][p] + t(i, 1 + p, c) + beta[i][c] - m.log_z);
      }
    }
  }
  return m;
}

namespace {

double squared_norm(const CrfModel &model) {
  double s = 0.0;
  for (double w : model.emission.data) s += w * w;
  for (double w : model.transition.data) s += w * w;
  return s;
}

// Adds observed minus expected counts of one sequence; returns its log p.
double accumulate_sequence(const CrfModel &model, const CrfExample &ex,
                           Matrix &emission, Matrix &transition) {
  PotentialTable table = potentials(model, ex.features);
  check_length(table, ex.labels);
  Marginals m = marginals(table);
  const auto num_features = static_cast<std::int32_t>(model.num_features());
  int prev = kBosRow;
  for (std::size_t i = 0; i < ex.labels.size(); ++i) {
    const int gold = label_index(ex.labels[i]);
    for (std::int32_t f : ex.features[i]) {
      if (f < 0 || f >= num_features) continue;
      emission(f, gold) += 1.0;
      emission(f, 0) -= m.node[i][0];
      emission(f, 1) -= m.node[i][1];
    }
    transition(prev, gold) += 1.0;
    if (i == 0) {
      transition(kBosRow, 0) -= m.node[0][0];
      transition(kBosRow, 1) -= m.node[0][1];
    } else {
      for (int p = 0; p < kNumLabels; ++p) {
        for (int c = 0; c < kNumLabels; ++c) transition(1 + p, c) -= m.edge[i][p][c];
      }
    }
    prev = prev_row(ex.labels[i]);
  }
  return sequence_score(table, ex.labels) - m.log_z;
}

}  // namespace

double crf_objective(const CrfModel &model, const std::vector<CrfExample> &data,
                     double l2) {
  double total = 0.0;
  for (const auto &ex : data) {
    total += sequence_log_prob(potentials(model, ex.features), ex.labels);
  }
  return total - 0.5 * l2 * squared_norm(model);
}

CrfGradient crf_gradient(const CrfModel &model, const std::vector<CrfExample> &data,
                         double l2, std::size_t threads) {
  const std::size_t num_chunks = (data.size() + kChunk - 1) / kChunk;
  struct Partial {
    Matrix emission;
    Matrix transition;
    double log_likelihood = 0.0;
  };
  std::vector<Partial> partials(num_chunks);
  auto run_chunk = [&](std::size_t c) {
    Partial &p = partials[c];
    p.emission = Matrix(model.num_features(), kNumLabels);
    p.transition = Matrix(kNumPrevStates, kNumLabels);
    std::size_t end = std::min(data.size(), (c + 1) * kChunk);
    for (std::size_t n = c * kChunk; n < end; ++n) {
      p.log_likelihood += accumulate_sequence(model, data[n], p.emission, p.transition);
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, num_chunks));
  if (threads == 1) {
    for (std::size_t c = 0; c < num_chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t c = w; c < num_chunks; c += threads) run_chunk(c);
      });
    }
    for (auto &t : pool) t.join();
  }

  CrfGradient g;
  g.emission = Matrix(model.num_features(), kNumLabels);
  g.transition = Matrix(kNumPrevStates, kNumLabels);
  double log_likelihood = 0.0;
  for (const auto &p : partials) {
    for (std::size_t i = 0; i < g.emission.data.size(); ++i) {
      g.emission.data[i] += p.emission.data[i];
    }
    for (std::size_t i = 0; i < g.transition.data.size(); ++i) {
      g.transition.data[i] += p.transition.data[i];
    }
    log_likelihood += p.log_likelihood;
  }
  for (std::size_t i = 0; i < g.emission.data.size(); ++i) {
    g.emission.data[i] -= l2 * model.emission.data[i];
  }
  for (std::size_t i = 0; i < g.transition.data.size(); ++i) {
    g.transition.data[i] -= l2 * model.transition.data[i];
  }
  g.objective = log_likelihood - 0.5 * l2 * squared_norm(model);
  return g;
}

CrfModel train_crf(FeatureIndex index, const std::vector<CrfExample> &data,
                   const CrfTrainConfig &config, CrfTrainingLog *log) {
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
    throw ConfigError("CRF learning_rate must be positive");
  }
  if (!(config.l2 >= 0.0) || !std::isfinite(config.l2)) {
    throw ConfigError("CRF l2 must be non-negative");
  }
  if (config.threads == 0) throw ConfigError("CRF threads must be positive");
  if (data.empty()) throw ConfigError("CRF training set is empty");
  for (const auto &ex : data) {
    if (ex.features.size() != ex.labels.size()) {
      throw LengthMismatch("CRF example has mismatched features and labels");
    }
  }

  CrfModel model = CrfModel::zeros(std::move(index), config.l2);
  CrfTrainingLog local;
  CrfTrainingLog &record = log ? *log : local;
  record = CrfTrainingLog{};

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    CrfGradient g = crf_gradient(model, data, config.l2, config.threads);
    if (!std::isfinite(g.objective)) {
      throw NumericError("CRF training produced a non-finite likelihood");
    }
    record.negative_log_likelihood.push_back(-g.objective);
    for (std::size_t i = 0; i < model.emission.data.size(); ++i) {
      model.emission.data[i] += config.learning_rate * g.emission.data[i];
    }
    for (std::size_t i = 0; i < model.transition.data.size(); ++i) {
      model.transition.data[i] += config.learning_rate * g.transition.data[i];
    }
  }
  double final_objective = crf_objective(model, data, config.l2);
  if (!std::isfinite(final_objective) || !model.all_finite()) {
    throw NumericError("CRF training produced non-finite weights");
  }
  record.negative_log_likelihood.push_back(-final_objective);
  return model;
}

}  // namespace techterm
