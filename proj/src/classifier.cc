#include "techterm/classifier.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "techterm/binary_io.h"
#include "techterm/error.h"
#include "techterm/metrics.h"
#include "techterm/rng.h"

namespace techterm {

namespace {

constexpr std::string_view kMagic = "TTCLSFR1";
constexpr std::uint32_t kVersion = 1;

void check_dim(const ClassifierModel &model, std::size_t dim) {
  if (dim != model.input_dim) {
    throw DimensionMismatch("classifier expects dimension " +
                            std::to_string(model.input_dim) + ", got " +
                            std::to_string(dim));
  }
}

std::vector<double> project(const ClassifierModel &model,
                            std::span<const double> x) {
  if (!model.use_hidden) return {x.begin(), x.end()};
  std::vector<double> h(model.hidden_dim);
  for (std::size_t r = 0; r < model.hidden_dim; ++r) {
    h[r] = dot(model.hidden.row(r), x);
  }
  return h;
}

std::array<double, 2> output_logits(const ClassifierModel &model,
                                    std::span<const double> h) {
  return {dot(model.output.row(0), h) + model.bias[0],
          dot(model.output.row(1), h) + model.bias[1]};
}

double log_sum_exp(const std::array<double, 2> &z) {
  double m = std::max(z[0], z[1]);
  return m + std::log(std::exp(z[0] - m) + std::exp(z[1] - m));
}

double sum_squares(const Matrix &m) {
  return std::inner_product(m.data.begin(), m.data.end(), m.data.begin(), 0.0);
}

}  // namespace

ClassifierModel ClassifierModel::zeros(std::size_t input_dim) {
  ClassifierModel m;
  m.input_dim = input_dim;
  m.hidden_dim = input_dim;
  m.hidden = Matrix::identity(input_dim);
  m.output = Matrix(2, input_dim);
  return m;
}

std::array<double, 2> ClassifierModel::logits(std::span<const double> x) const {
  check_dim(*this, x.size());
  return output_logits(*this, project(*this, x));
}

bool ClassifierModel::all_finite() const {
  return hidden.all_finite() && output.all_finite() && std::isfinite(bias[0]) &&
         std::isfinite(bias[1]);
}

void ClassifierModel::save(std::ostream &out) const {
  binio::write_magic(out, kMagic);
  binio::write_u32(out, kVersion);
  binio::write_u32(out, static_cast<std::uint32_t>(input_dim));
  binio::write_u32(out, static_cast<std::uint32_t>(hidden_dim));
  binio::write_u32(out, use_hidden ? 1 : 0);
  binio::write_f64s(out, hidden.data);
  binio::write_f64s(out, output.data);
  binio::write_f64(out, bias[0]);
  binio::write_f64(out, bias[1]);
}

void ClassifierModel::save_file(const std::string &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  save(out);
}

ClassifierModel ClassifierModel::load(std::istream &in) {
  binio::expect_magic(in, kMagic);
  binio::expect_version(in, kVersion);
  ClassifierModel m;
  m.input_dim = binio::read_u32(in);
  m.hidden_dim = binio::read_u32(in);
  std::uint32_t flag = binio::read_u32(in);
  if (flag > 1) throw FormatError("classifier header: bad use_hidden flag");
  m.use_hidden = flag == 1;
  if (m.input_dim == 0 || m.hidden_dim == 0) {
    throw FormatError("classifier header has zero dimension");
  }
  if (!m.use_hidden && m.hidden_dim != m.input_dim) {
    throw FormatError("classifier header: identity projection must be square");
  }
  m.hidden = Matrix(m.hidden_dim, m.input_dim);
  m.hidden.data = binio::read_f64s(in, m.hidden.data.size());
  m.output = Matrix(2, m.hidden_dim);
  m.output.data = binio::read_f64s(in, m.output.data.size());
  m.bias[0] = binio::read_f64(in);
  m.bias[1] = binio::read_f64(in);
  if (!m.all_finite()) throw FormatError("classifier weights are not finite");
  return m;
}

ClassifierModel ClassifierModel::load_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open classifier '" + path + "'");
  return load(in);
}

std::array<double, 2> softmax(const std::array<double, 2> &z) {
  double lse = log_sum_exp(z);
  return {std::exp(z[0] - lse), std::exp(z[1] - lse)};
}

Prediction predict(const ClassifierModel &model, std::span<const double> x) {
  std::array<double, 2> z = model.logits(x);
  Prediction p;
  p.probabilities = softmax(z);
  p.label = z[1] > z[0] ? SentenceLabel::ContainsTech : SentenceLabel::NoTech;
  return p;
}

double loss(const ClassifierModel &model, std::span<const ClassifierExample> batch) {
  if (batch.empty()) throw ConfigError("loss needs a non-empty batch");
  double total = 0.0;
  for (const auto &ex : batch) {
    std::array<double, 2> z = model.logits(ex.features);
    total += log_sum_exp(z) - z[static_cast<int>(ex.label)];
  }
  return total / static_cast<double>(batch.size());
}

double objective(const ClassifierModel &model,
                 std::span<const ClassifierExample> batch, double l2) {
  double reg = sum_squares(model.output);
  if (model.use_hidden) reg += sum_squares(model.hidden);
  return loss(model, batch) + 0.5 * l2 * reg;
}

ClassifierGradient gradient(const ClassifierModel &model,
                            std::span<const ClassifierExample> batch, double l2) {
  if (batch.empty()) throw ConfigError("gradient needs a non-empty batch");
  ClassifierGradient g;
  g.output = Matrix(2, model.hidden_dim);
  if (model.use_hidden) g.hidden = Matrix(model.hidden_dim, model.input_dim);
  const double scale = 1.0 / static_cast<double>(batch.size());
  std::vector<double> dh(model.hidden_dim);

  for (const auto &ex : batch) {
    check_dim(model, ex.features.size());
    std::vector<double> h = project(model, ex.features);
    std::array<double, 2> p = softmax(output_logits(model, h));
    std::array<double, 2> dz = p;
    dz[static_cast<int>(ex.label)] -= 1.0;
    for (int c = 0; c < 2; ++c) {
      auto row = g.output.row(c);
      for (std::size_t j = 0; j < model.hidden_dim; ++j) row[j] += scale * dz[c] * h[j];
      g.bias[c] += scale * dz[c];
    }
    if (model.use_hidden) {
      for (std::size_t j = 0; j < model.hidden_dim; ++j) {
        dh[j] = dz[0] * model.output(0, j) + dz[1] * model.output(1, j);
      }
      for (std::size_t r = 0; r < model.hidden_dim; ++r) {
        auto row = g.hidden.row(r);
        for (std::size_t k = 0; k < model.input_dim; ++k) {
          row[k] += scale * dh[r] * ex.features[k];
        }
      }
    }
  }
  if (l2 > 0.0) {
    for (std::size_t i = 0; i < g.output.data.size(); ++i) {
      g.output.data[i] += l2 * model.output.data[i];
    }
    if (model.use_hidden) {
      for (std::size_t i = 0; i < g.hidden.data.size(); ++i) {
        g.hidden.data[i] += l2 * model.hidden.data[i];
      }
    }
  }
  return g;
}

ClassifierModel init_classifier(std::size_t input_dim, const ClassifierConfig &config) {
  if (input_dim == 0) throw ConfigError("classifier input dimension is zero");
  Rng rng(config.seed);
  ClassifierModel m;
  m.input_dim = input_dim;
  m.use_hidden = config.use_hidden;
  m.hidden_dim = config.use_hidden && config.hidden_dim > 0 ? config.hidden_dim
                                                             : input_dim;
  if (m.hidden_dim == input_dim) {
    m.hidden = Matrix::identity(input_dim);
  } else {
    m.hidden = Matrix(m.hidden_dim, input_dim);
    const double bound = 1.0 / std::sqrt(static_cast<double>(input_dim));
    for (double &v : m.hidden.data) v = rng.uniform_real(-bound, bound);
  }
  m.output = Matrix(2, m.hidden_dim);
  const double bound = 0.5 / static_cast<double>(m.hidden_dim);
  for (double &v : m.output.data) v = rng.uniform_real(-bound, bound);
  return m;
}

namespace {

void validate(const ClassifierConfig &c) {
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate)) {
    throw ConfigError("classifier learning_rate must be positive");
  }
  if (!(c.l2 >= 0.0) || !std::isfinite(c.l2)) {
    throw ConfigError("classifier l2 must be non-negative");
  }
}

double validation_f(const ClassifierModel &model,
                    std::span<const ClassifierExample> validation) {
  ConfusionCounts counts;
  for (const auto &ex : validation) {
    bool predicted = predict(model, ex.features).label == SentenceLabel::ContainsTech;
    bool gold = ex.label == SentenceLabel::ContainsTech;
    if (predicted && gold) ++counts.tp;
    else if (predicted) ++counts.fp;
    else if (gold) ++counts.fn;
    else ++counts.tn;
  }
  return f_score(counts).f_score;
}

void apply(ClassifierModel &model, const ClassifierGradient &g, double lr) {
  for (std::size_t i = 0; i < model.output.data.size(); ++i) {
    model.output.data[i] -= lr * g.output.data[i];
  }
  model.bias[0] -= lr * g.bias[0];
  model.bias[1] -= lr * g.bias[1];
  if (model.use_hidden) {
    for (std::size_t i = 0; i < model.hidden.data.size(); ++i) {
      model.hidden.data[i] -= lr * g.hidden.data[i];
    }
  }
}

}  // namespace

ClassifierModel train_classifier(std::span<const ClassifierExample> train,
                                 std::span<const ClassifierExample> validation,
                                 const ClassifierConfig &config,
                                 ClassifierTrainingLog *log) {
  validate(config);
  if (train.empty()) throw ConfigError("classifier training set is empty");
  const std::size_t dim = train.front().features.size();
  ClassifierModel model = init_classifier(dim, config);
  for (const auto &ex : train) check_dim(model, ex.features.size());

  ClassifierTrainingLog local;
  ClassifierTrainingLog &record = log ? *log : local;
  record = ClassifierTrainingLog{};
  record.objective.push_back(objective(model, train, config.l2));
  ClassifierModel best = model;
  double best_f = validation.empty() ? 0.0 : validation_f(model, validation);
  record.validation_f.push_back(best_f);

  Rng rng(config.seed ^ 0x5851f42d4c957f2dULL);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch_size =
      config.batch_size == 0 ? train.size() : config.batch_size;
  std::vector<ClassifierExample> batch;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    if (config.batch_size != 0) rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      std::size_t stop = std::min(order.size(), start + batch_size);
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) batch.push_back(train[order[i]]);
      apply(model, gradient(model, batch, config.l2), config.learning_rate);
    }
    double obj = objective(model, train, config.l2);
    if (!std::isfinite(obj) || !model.all_finite()) {
      throw NumericError("classifier training produced a non-finite loss");
    }
    record.objective.push_back(obj);
    if (validation.empty()) {
      best = model;
      record.best_epoch = epoch;
      record.validation_f.push_back(0.0);
      continue;
    }
    double f = validation_f(model, validation);
    record.validation_f.push_back(f);
    if (f > best_f) {
      best_f = f;
      best = model;
      record.best_epoch = epoch;
    }
  }
  return best;
}

}  // namespace techterm
