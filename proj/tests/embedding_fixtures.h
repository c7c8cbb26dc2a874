#ifndef TECHTERM_TESTS_EMBEDDING_FIXTURES_H_
#define TECHTERM_TESTS_EMBEDDING_FIXTURES_H_

#include <string>
#include <vector>

#include "techterm/corpus.h"
#include "techterm/rng.h"
#include "test_util.h"

namespace techterm::testing {

// 500 sentences: "alpha" and "beta" share one pool of neighbours, "gamma"
// lives in a disjoint pool.
inline std::vector<Sentence> shared_context_corpus(std::uint64_t seed) {
  const std::vector<std::string> shared = {"red", "green", "blue", "cyan",
                                           "pink", "teal", "gold", "gray"};
  const std::vector<std::string> other = {"one", "two", "three", "four",
                                          "five", "six", "seven", "eight"};
  Rng rng(seed);
  std::vector<Sentence> corpus;
  for (int i = 0; i < 500; ++i) {
    const int kind = i % 3;
    const auto &pool = kind == 2 ? other : shared;
    std::vector<std::string> words;
    for (int k = 0; k < 2; ++k) words.push_back(pool[rng.uniform_index(pool.size())]);
    words.push_back(kind == 0 ? "alpha" : kind == 1 ? "beta" : "gamma");
    for (int k = 0; k < 2; ++k) words.push_back(pool[rng.uniform_index(pool.size())]);
    corpus.push_back(make_sentence(words));
  }
  return corpus;
}

}  // namespace techterm::testing

#endif  // TECHTERM_TESTS_EMBEDDING_FIXTURES_H_
