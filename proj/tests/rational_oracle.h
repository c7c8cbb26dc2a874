#ifndef TECHTERM_TESTS_RATIONAL_ORACLE_H_
#define TECHTERM_TESTS_RATIONAL_ORACLE_H_

#include <cstdint>
#include <numeric>

#include "techterm/metrics.h"

namespace techterm::testing {

// Exact fraction with a non-negative, reduced representation.
struct Rational {
  __int128 num = 0;
  __int128 den = 1;

  static __int128 gcd(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }
  static Rational make(__int128 n, __int128 d) {
    if (d == 0) return {0, 1};  // 0/0 and x/0 collapse to zero
    __int128 g = gcd(n, d);
    return {n / g, d / g};
  }
  Rational operator+(const Rational &o) const { return make(num * o.den + o.num * den, den * o.den); }
  Rational operator*(const Rational &o) const { return make(num * o.num, den * o.den); }
  Rational operator/(const Rational &o) const { return make(num * o.den, den * o.num); }
  bool operator==(const Rational &o) const { return num == o.num && den == o.den; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct ExactScores {
  Rational precision, recall, f;
};

inline ExactScores exact_scores(const ConfusionCounts &c) {
  ExactScores s;
  s.precision = Rational::make(c.tp, c.tp + c.fp);
  s.recall = Rational::make(c.tp, c.tp + c.fn);
  s.f = (Rational{2, 1} * s.precision * s.recall) / (s.precision + s.recall);
  return s;
}

}  // namespace techterm::testing

#endif  // TECHTERM_TESTS_RATIONAL_ORACLE_H_
