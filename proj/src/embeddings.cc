#include "techterm/embeddings.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "techterm/binary_io.h"
#include "techterm/error.h"
#include "techterm/text.h"

namespace techterm {

namespace {

constexpr std::string_view kMagic = "TTEMBED1";
constexpr std::uint32_t kVersion = 1;

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

}  // namespace

Vocabulary Vocabulary::build(const std::vector<Sentence> &corpus,
                             std::uint64_t min_count) {
  if (min_count < 1) throw ConfigError("min_count must be >= 1");
  std::map<std::string, std::uint64_t> counts;
  for (const auto &s : corpus) {
    for (const auto &t : s.tokens) ++counts[case_fold(t.text)];
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto &[w, c] : counts) {
    if (c >= min_count) kept.emplace_back(w, c);
  }
  if (kept.empty()) throw EmptyVocabulary("no word reaches min_count");
  std::stable_sort(kept.begin(), kept.end(), [](const auto &a, const auto &b) {
    return a.second > b.second;
  });
  std::vector<std::string> words;
  std::vector<std::uint64_t> freqs;
  for (auto &[w, c] : kept) {
    words.push_back(w);
    freqs.push_back(c);
  }
  return from_words(std::move(words), std::move(freqs), min_count);
}

Vocabulary Vocabulary::from_words(std::vector<std::string> words,
                                  std::vector<std::uint64_t> counts,
                                  std::uint64_t min_count) {
  if (words.size() != counts.size()) {
    throw LengthMismatch("vocabulary words and counts differ in length");
  }
  Vocabulary v;
  v.min_count_ = min_count;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!v.index_.emplace(words[i], static_cast<std::int32_t>(i)).second) {
      throw FormatError("duplicate vocabulary word '" + words[i] + "'");
    }
  }
  v.words_ = std::move(words);
  v.counts_ = std::move(counts);
  return v;
}

std::optional<std::int32_t> Vocabulary::find(std::string_view folded_word) const {
  auto it = index_.find(std::string(folded_word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::int32_t> Vocabulary::encode(const Sentence &sentence) const {
  std::vector<std::int32_t> ids;
  ids.reserve(sentence.tokens.size());
  for (const auto &t : sentence.tokens) {
    auto id = find(case_fold(t.text));
    ids.push_back(id ? *id : kOutOfVocabulary);
  }
  return ids;
}

std::vector<std::pair<std::int32_t, std::int32_t>> generate_pairs(
    std::span<const std::int32_t> ids, std::size_t window) {
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
  const std::size_t n = ids.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (ids[i] < 0) continue;
    std::size_t lo = i >= window ? i - window : 0;
    std::size_t hi = std::min(n - 1, i + window);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j != i && ids[j] >= 0) pairs.emplace_back(ids[i], ids[j]);
    }
  }
  return pairs;
}

std::vector<std::pair<std::int32_t, std::int32_t>> generate_pairs(
    const Sentence &sentence, const Vocabulary &vocab, std::size_t window) {
  return generate_pairs(vocab.encode(sentence), window);
}

NegativeSampler::NegativeSampler(std::span<const std::uint64_t> counts,
                                 double power) {
  if (counts.empty()) throw EmptyVocabulary("negative sampler needs words");
  cumulative_.reserve(counts.size());
  double total = 0.0;
  for (std::uint64_t c : counts) {
    total += std::pow(static_cast<double>(c), power);
    cumulative_.push_back(total);
  }
  for (double &c : cumulative_) c /= total;
  cumulative_.back() = 1.0;
}

std::int32_t NegativeSampler::draw(Rng &rng) const {
  double u = rng.uniform_real();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  std::size_t id = static_cast<std::size_t>(it - cumulative_.begin());
  return static_cast<std::int32_t>(std::min(id, cumulative_.size() - 1));
}

double NegativeSampler::probability(std::size_t id) const {
  return id == 0 ? cumulative_[0] : cumulative_[id] - cumulative_[id - 1];
}

double pair_objective(std::span<const double> center,
                      std::span<const double> context,
                      const std::vector<std::span<const double>> &negatives) {
  double obj = log_sigmoid(dot(context, center));
  for (const auto &neg : negatives) obj += log_sigmoid(-dot(neg, center));
  return obj;
}

namespace {

// Writes the gradient of pair_objective into the output spans, which must
// be pre-sized to the vector dimension.
void compute_pair_gradient(std::span<const double> center,
                           std::span<const double> context,
                           const std::vector<std::span<const double>> &negatives,
                           std::span<double> d_center, std::span<double> d_context,
                           const std::vector<std::span<double>> &d_negatives) {
  const std::size_t dim = center.size();
  double g = 1.0 - sigmoid(dot(context, center));
  for (std::size_t i = 0; i < dim; ++i) {
    d_center[i] = g * context[i];
    d_context[i] = g * center[i];
  }
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    double gk = -sigmoid(dot(negatives[k], center));
    for (std::size_t i = 0; i < dim; ++i) {
      d_center[i] += gk * negatives[k][i];
      d_negatives[k][i] = gk * center[i];
    }
  }
}

}  // namespace

PairGradient pair_gradient(std::span<const double> center,
                           std::span<const double> context,
                           const std::vector<std::span<const double>> &negatives) {
  const std::size_t dim = center.size();
  PairGradient grad;
  grad.center.assign(dim, 0.0);
  grad.context.assign(dim, 0.0);
  grad.negatives.assign(negatives.size(), std::vector<double>(dim, 0.0));
  std::vector<std::span<double>> d_neg;
  for (auto &v : grad.negatives) d_neg.emplace_back(v);
  compute_pair_gradient(center, context, negatives, grad.center, grad.context,
                        d_neg);
  return grad;
}

EmbeddingModel::EmbeddingModel(Vocabulary vocab, Matrix input, Matrix output)
    : vocab_(std::move(vocab)), input_(std::move(input)), output_(std::move(output)) {
  if (input_.rows != vocab_.size() || output_.rows != vocab_.size() ||
      input_.cols != output_.cols) {
    throw DimensionMismatch("embedding matrices do not match the vocabulary");
  }
}

std::optional<std::span<const double>> EmbeddingModel::vector(
    std::string_view word) const {
  auto id = vocab_.find(case_fold(word));
  if (!id) return std::nullopt;
  return input_.row(static_cast<std::size_t>(*id));
}

void EmbeddingModel::save(std::ostream &out) const {
  binio::write_magic(out, kMagic);
  binio::write_u32(out, kVersion);
  binio::write_u32(out, static_cast<std::uint32_t>(dim()));
  binio::write_u32(out, static_cast<std::uint32_t>(vocab_.size()));
  binio::write_u64(out, vocab_.min_count());
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    binio::write_string(out, vocab_.word(i));
    binio::write_u64(out, vocab_.count(i));
  }
  binio::write_f64s(out, input_.data);
  binio::write_f64s(out, output_.data);
}

void EmbeddingModel::save_file(const std::string &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  save(out);
}

EmbeddingModel EmbeddingModel::load(std::istream &in) {
  binio::expect_magic(in, kMagic);
  binio::expect_version(in, kVersion);
  std::uint32_t dim = binio::read_u32(in);
  std::uint32_t size = binio::read_u32(in);
  if (dim == 0 || size == 0) throw FormatError("embedding header has zero size");
  std::uint64_t min_count = binio::read_u64(in);
  std::vector<std::string> words(size);
  std::vector<std::uint64_t> counts(size);
  for (std::uint32_t i = 0; i < size; ++i) {
    words[i] = binio::read_string(in);
    counts[i] = binio::read_u64(in);
  }
  Matrix input(size, dim), output(size, dim);
  input.data = binio::read_f64s(in, input.data.size());
  output.data = binio::read_f64s(in, output.data.size());
  if (!input.all_finite() || !output.all_finite()) {
    throw FormatError("embedding matrices contain non-finite values");
  }
  return EmbeddingModel(
      Vocabulary::from_words(std::move(words), std::move(counts), min_count),
      std::move(input), std::move(output));
}

EmbeddingModel EmbeddingModel::load_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open embeddings '" + path + "'");
  return load(in);
}

EmbeddingModel EmbeddingModel::import_text(std::istream &in) {
  std::vector<std::string> words;
  std::vector<double> values;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    std::vector<double> row;
    double v;
    while (fields >> v) row.push_back(v);
    if (!fields.eof()) {
      throw FormatError("vector line " + std::to_string(line_no) +
                        ": non-numeric value");
    }
    if (dim == 0) dim = row.size();
    if (row.empty() || row.size() != dim) {
      throw FormatError("vector line " + std::to_string(line_no) +
                        ": dimension mismatch");
    }
    words.push_back(case_fold(word));
    values.insert(values.end(), row.begin(), row.end());
  }
  if (words.empty()) throw EmptyVocabulary("no vectors in text import");
  std::vector<std::uint64_t> counts(words.size(), 1);
  Matrix input(words.size(), dim);
  input.data = std::move(values);
  Matrix output(words.size(), dim);
  return EmbeddingModel(Vocabulary::from_words(std::move(words), std::move(counts)),
                        std::move(input), std::move(output));
}

EmbeddingModel init_skipgram(Vocabulary vocab, std::size_t dim,
                             std::uint64_t seed) {
  Rng rng(seed);
  Matrix input(vocab.size(), dim);
  const double bound = 0.5 / static_cast<double>(dim);
  for (double &v : input.data) v = rng.uniform_real(-bound, bound);
  Matrix output(vocab.size(), dim);
  return EmbeddingModel(std::move(vocab), std::move(input), std::move(output));
}

namespace {

void validate(const SkipgramConfig &c) {
  if (c.dim == 0) throw ConfigError("dim must be positive");
  if (c.window == 0) throw ConfigError("window must be positive");
  if (c.negatives == 0) throw ConfigError("negatives must be positive");
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate)) {
    throw ConfigError("learning_rate must be positive");
  }
  if (c.min_count == 0) throw ConfigError("min_count must be positive");
  if (c.threads == 0) throw ConfigError("threads must be positive");
}

// Trains over sentences [begin, end) of `encoded`. `progress` counts pairs
// processed by all workers and drives the learning-rate decay.
void train_range(const std::vector<std::vector<std::int32_t>> &encoded,
                 std::size_t begin, std::size_t end, const SkipgramConfig &config,
                 const NegativeSampler &sampler, double total_pairs,
                 std::atomic<std::uint64_t> &progress, Rng &rng,
                 Matrix &input, Matrix &output) {
  const std::size_t dim = config.dim;
  std::vector<double> d_center(dim), d_context(dim);
  std::vector<std::vector<double>> d_neg_store(config.negatives,
                                               std::vector<double>(dim));
  std::vector<std::int32_t> neg_ids;
  std::vector<std::span<const double>> neg_rows;
  std::vector<std::span<double>> d_neg;

  for (std::size_t s = begin; s < end; ++s) {
    for (const auto &[center, context] : generate_pairs(encoded[s], config.window)) {
      std::uint64_t done = progress.fetch_add(1, std::memory_order_relaxed);
      double lr = config.learning_rate *
                  std::max(1e-4, 1.0 - static_cast<double>(done) / total_pairs);

      neg_ids.clear();
      for (std::size_t k = 0; k < config.negatives; ++k) {
        std::int32_t id = sampler.draw(rng);
        if (id != context) neg_ids.push_back(id);
      }
      neg_rows.clear();
      d_neg.clear();
      for (std::size_t k = 0; k < neg_ids.size(); ++k) {
        neg_rows.push_back(output.row(neg_ids[k]));
        d_neg.emplace_back(d_neg_store[k]);
      }
      auto v = input.row(center);
      auto u = output.row(context);
      compute_pair_gradient(v, u, neg_rows, d_center, d_context, d_neg);
      for (std::size_t i = 0; i < dim; ++i) {
        v[i] += lr * d_center[i];
        u[i] += lr * d_context[i];
      }
      for (std::size_t k = 0; k < neg_ids.size(); ++k) {
        auto row = output.row(neg_ids[k]);
        for (std::size_t i = 0; i < dim; ++i) row[i] += lr * d_neg[k][i];
      }
    }
  }
}

}  // namespace

EmbeddingModel train_skipgram(const std::vector<Sentence> &corpus,
                              const SkipgramConfig &config) {
  validate(config);
  if (corpus.empty()) throw ConfigError("cannot train embeddings on an empty corpus");
  Vocabulary vocab = Vocabulary::build(corpus, config.min_count);
  EmbeddingModel model = init_skipgram(vocab, config.dim, config.seed);
  if (config.epochs == 0) return model;

  std::vector<std::vector<std::int32_t>> encoded;
  encoded.reserve(corpus.size());
  std::uint64_t pairs_per_epoch = 0;
  for (const auto &s : corpus) {
    encoded.push_back(vocab.encode(s));
    pairs_per_epoch += generate_pairs(encoded.back(), config.window).size();
  }
  const double total_pairs =
      std::max<double>(1.0, static_cast<double>(pairs_per_epoch) * config.epochs);

  NegativeSampler sampler(vocab.counts());
  Matrix &input = model.mutable_input_vectors();
  Matrix &output = model.mutable_output_vectors();
  std::atomic<std::uint64_t> progress{0};

  if (config.threads == 1) {
    Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
      train_range(encoded, 0, encoded.size(), config, sampler, total_pairs,
                  progress, rng, input, output);
    }
  } else {
    // Hogwild: workers update shared rows without locks.
    const std::size_t workers = std::min(config.threads, encoded.size());
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        std::size_t begin = encoded.size() * w / workers;
        std::size_t end = encoded.size() * (w + 1) / workers;
        pool.emplace_back([&, begin, end, w, epoch] {
          Rng rng(config.seed + 1000003ULL * (epoch * workers + w + 1));
          train_range(encoded, begin, end, config, sampler, total_pairs,
                      progress, rng, input, output);
        });
      }
      for (auto &t : pool) t.join();
    }
  }
  if (!input.all_finite() || !output.all_finite()) {
    throw NumericError("skipgram training diverged");
  }
  return model;
}

SentenceVector embed_sentence(const EmbeddingModel &model,
                              const Sentence &sentence) {
  SentenceVector out;
  out.values.assign(model.dim(), 0.0);
  for (const auto &t : sentence.tokens) {
    auto v = model.vector(t.text);
    if (!v) continue;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += (*v)[i];
    ++out.contributing_count;
  }
  if (out.contributing_count > 0) {
    const double n = static_cast<double>(out.contributing_count);
    for (double &x : out.values) x /= n;
  }
  return out;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double na = std::sqrt(dot(a, a));
  double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

}  // namespace techterm
