#ifndef TECHTERM_TESTS_CRF_ORACLE_H_
#define TECHTERM_TESTS_CRF_ORACLE_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "techterm/crf.h"
#include "techterm/rng.h"

namespace techterm::testing {

// Brute-force reference computed straight from the weights, independent of
// the potential tables and recursions under test.
struct Enumeration {
  std::vector<std::vector<TokenLabel>> sequences;
  std::vector<double> scores;
  double log_z = 0.0;
  std::vector<TokenLabel> best;
  std::vector<std::array<double, 2>> node;
  std::vector<std::array<std::array<double, 2>, 2>> edge;
};

inline double direct_score(const CrfModel &model, const SequenceFeatures &x,
                           const std::vector<TokenLabel> &y) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    int cur = static_cast<int>(y[i]);
    int prev = i == 0 ? 0 : 1 + static_cast<int>(y[i - 1]);
    s += model.transition(prev, cur);
    for (auto f : x[i]) s += model.emission(f, cur);
  }
  return s;
}

inline Enumeration enumerate(const CrfModel &model, const SequenceFeatures &x) {
  Enumeration e;
  const std::size_t n = x.size();
  const std::size_t total = std::size_t{1} << n;
  double max_score = -std::numeric_limits<double>::infinity();
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<TokenLabel> y(n);
    // bit k set means label O at position k
    for (std::size_t k = 0; k < n; ++k)
      y[k] = (code >> (n - 1 - k)) & 1 ? TokenLabel::O : TokenLabel::T;
    double s = direct_score(model, x, y);
    // codes ascend lexicographically with O > T, so >= keeps the O-preferring tie
    if (s >= max_score) {
      max_score = s;
      e.best = y;
    }
    e.sequences.push_back(std::move(y));
    e.scores.push_back(s);
  }
  double acc = 0.0;
  for (double s : e.scores) acc += std::exp(s - max_score);
  e.log_z = max_score + std::log(acc);

  e.node.assign(n, {0.0, 0.0});
  e.edge.assign(n, {});
  for (std::size_t k = 0; k < e.sequences.size(); ++k) {
    double p = std::exp(e.scores[k] - e.log_z);
    const auto &y = e.sequences[k];
    for (std::size_t i = 0; i < n; ++i) {
      e.node[i][static_cast<int>(y[i])] += p;
      if (i > 0) e.edge[i][static_cast<int>(y[i - 1])][static_cast<int>(y[i])] += p;
    }
  }
  return e;
}

inline CrfModel random_crf(std::size_t features, Rng &rng, double scale = 2.0,
                           bool integral = false) {
  std::vector<std::string> names;
  for (std::size_t f = 0; f < features; ++f) names.push_back("F=" + std::to_string(f));
  CrfModel m = CrfModel::zeros(FeatureIndex::from_names(names));
  auto draw = [&] {
    if (integral) return static_cast<double>(static_cast<int>(rng.uniform_index(3)) - 1);
    return rng.uniform_real(-scale, scale);
  };
  for (double &v : m.emission.data) v = draw();
  for (double &v : m.transition.data) v = draw();
  return m;
}

inline SequenceFeatures random_sequence(std::size_t features, std::size_t length,
                                        Rng &rng) {
  SequenceFeatures x(length);
  for (auto &ids : x)
    for (std::size_t f = 0; f < features; ++f)
      if (rng.uniform_index(3) == 0) ids.push_back(static_cast<std::int32_t>(f));
  return x;
}

}  // namespace techterm::testing

#endif  // TECHTERM_TESTS_CRF_ORACLE_H_
