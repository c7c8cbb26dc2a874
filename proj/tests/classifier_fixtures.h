#ifndef TECHTERM_TESTS_CLASSIFIER_FIXTURES_H_
#define TECHTERM_TESTS_CLASSIFIER_FIXTURES_H_

#include <cmath>
#include <vector>

#include "techterm/classifier.h"
#include "techterm/rng.h"

namespace techterm::testing {

inline double gaussian(Rng &rng) {
  double u1 = 1.0 - rng.uniform_real();
  double u2 = rng.uniform_real();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

// Two clusters at +/-[1,...,1] with sigma 0.1; positives sit at +1.
inline std::vector<ClassifierExample> separable_toy_set(std::size_t dim,
                                                        std::size_t points,
                                                        std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ClassifierExample> out;
  for (std::size_t i = 0; i < points; ++i) {
    bool positive = i % 2 == 0;
    ClassifierExample ex;
    ex.label = positive ? SentenceLabel::ContainsTech : SentenceLabel::NoTech;
    for (std::size_t k = 0; k < dim; ++k)
      ex.features.push_back((positive ? 1.0 : -1.0) + 0.1 * gaussian(rng));
    out.push_back(ex);
  }
  return out;
}

inline double accuracy(const ClassifierModel &model,
                       const std::vector<ClassifierExample> &data) {
  std::size_t right = 0;
  for (const auto &ex : data) right += predict(model, ex.features).label == ex.label;
  return static_cast<double>(right) / data.size();
}

}  // namespace techterm::testing

#endif  // TECHTERM_TESTS_CLASSIFIER_FIXTURES_H_
