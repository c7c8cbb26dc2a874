#include <doctest.h>

#include <cmath>
#include <sstream>

#include "crf_oracle.h"
#include "techterm/crf.h"
#include "techterm/error.h"
#include "test_util.h"

using namespace techterm;
using namespace techterm::testing;

namespace {

double rel(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

CrfModel feature_model(std::vector<std::string> names) {
  return CrfModel::zeros(FeatureIndex::from_names(std::move(names)));
}

// 50 sequences: W0=hive always tagged T, W0=the and W0=uses always O.
std::vector<CrfExample> hive_dataset(const FeatureIndex &index, Rng &rng) {
  std::vector<CrfExample> data;
  const std::vector<std::string> fillers = {"W0=the", "W0=uses"};
  for (int n = 0; n < 50; ++n) {
    CrfExample ex;
    std::size_t len = 2 + rng.uniform_index(5);
    std::size_t hive_at = rng.uniform_index(len);
    for (std::size_t i = 0; i < len; ++i) {
      std::string f = i == hive_at ? "W0=hive" : fillers[rng.uniform_index(2)];
      ex.features.push_back({*index.lookup(f)});
      ex.labels.push_back(i == hive_at ? TokenLabel::T : TokenLabel::O);
    }
    data.push_back(ex);
  }
  return data;
}

}  // namespace

TEST_CASE("potentials examples") {
  CrfModel m = feature_model({"W0=hive", "W0=the"});
  SequenceFeatures x = {{1}, {0}, {0, 1}};
  SUBCASE("zero weights") {
    PotentialTable t = potentials(m, x);
    REQUIRE(t.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (int p = 0; p < kNumPrevStates; ++p)
        for (int c = 0; c < kNumLabels; ++c) CHECK(t(i, p, c) == 0.0);
  }
  SUBCASE("one fired feature") {
    m.emission(0, label_index(TokenLabel::T)) = 2.0;
    PotentialTable t = potentials(m, x);
    CHECK(t(1, prev_row(TokenLabel::O), 0) - t(1, prev_row(TokenLabel::O), 1) == 2.0);
    CHECK(t(0, kBosRow, 0) == t(0, kBosRow, 1));
  }
  SUBCASE("constant on transitions shifts potentials, not probabilities") {
    Rng rng(1);
    CrfModel r = random_crf(2, rng);
    CrfModel shifted = r;
    for (double &v : shifted.transition.data) v += 0.7;
    PotentialTable a = potentials(r, x), b = potentials(shifted, x);
    for (std::size_t i = 0; i < 3; ++i)
      for (int p = 0; p < kNumPrevStates; ++p)
        for (int c = 0; c < kNumLabels; ++c)
          CHECK(b(i, p, c) == doctest::Approx(a(i, p, c) + 0.7));
    std::vector<TokenLabel> y = {TokenLabel::T, TokenLabel::O, TokenLabel::T};
    CHECK(std::abs(sequence_log_prob(a, y) - sequence_log_prob(b, y)) < 1e-9);
  }
  SUBCASE("unknown ids ignored") {
    m.emission(0, 0) = 1.0;
    PotentialTable t = potentials(m, SequenceFeatures{{0, 57, -1}});
    CHECK(t(0, kBosRow, 0) == 1.0);
  }
  SUBCASE("string features through the frozen index") {
    m.emission(0, 0) = 3.0;
    PotentialTable t = potentials(m, std::vector<SparseFeatures>{{{"W0=hive", "W0=new"}}});
    CHECK(t(0, kBosRow, 0) == 3.0);
  }
}

TEST_CASE("log_partition and sequence_log_prob examples") {
  CrfModel m = feature_model({"a"});
  for (std::size_t len : {1u, 2u, 5u, 12u}) {
    PotentialTable t = potentials(m, SequenceFeatures(len));
    CHECK(log_partition(t) == doctest::Approx(len * std::log(2.0)).epsilon(1e-14));
    std::vector<TokenLabel> y(len, TokenLabel::O);
    CHECK(sequence_log_prob(t, y) == doctest::Approx(-(len * std::log(2.0))));
    Marginals mg = marginals(t);
    for (const auto &node : mg.node) {
      CHECK(node[0] == doctest::Approx(0.5));
      CHECK(node[1] == doctest::Approx(0.5));
    }
  }
  PotentialTable single;
  single.log_phi.push_back({});
  single.log_phi[0][kBosRow] = {0.3, -1.2};
  CHECK(log_partition(single) ==
        doctest::Approx(std::log(std::exp(0.3) + std::exp(-1.2))).epsilon(1e-14));
  single.log_phi[0][kBosRow] = {0.0, 0.0};
  CHECK(sequence_log_prob(single, {TokenLabel::T}) == doctest::Approx(std::log(0.5)));
  CHECK_THROWS_AS(sequence_log_prob(single, {TokenLabel::T, TokenLabel::O}), LengthMismatch);
}

TEST_CASE("inference matches exhaustive enumeration") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t features = 1 + rng.uniform_index(10);
    std::size_t len = 1 + rng.uniform_index(10);
    CrfModel m = random_crf(features, rng);
    SequenceFeatures x = random_sequence(features, len, rng);
    Enumeration e = enumerate(m, x);
    PotentialTable t = potentials(m, x);

    CHECK(std::abs(log_partition(t) - e.log_z) < 1e-8);
    CHECK(viterbi(t) == e.best);
    CHECK(viterbi(m, x) == e.best);

    double mass = 0.0;
    for (std::size_t k = 0; k < e.sequences.size(); ++k) {
      double lp = sequence_log_prob(t, e.sequences[k]);
      CHECK(lp <= 1e-12);
      mass += std::exp(lp);
    }
    CHECK(std::abs(mass - 1.0) < 1e-9);

    Marginals mg = marginals(t);
    for (std::size_t i = 0; i < len; ++i) {
      CHECK(std::abs(mg.node[i][0] + mg.node[i][1] - 1.0) < 1e-9);
      for (int c = 0; c < 2; ++c) {
        CHECK(std::abs(mg.node[i][c] - e.node[i][c]) < 1e-8);
        if (i == 0) continue;
        CHECK(std::abs(mg.edge[i][0][c] + mg.edge[i][1][c] - mg.node[i][c]) < 1e-9);
        for (int p = 0; p < 2; ++p) CHECK(std::abs(mg.edge[i][p][c] - e.edge[i][p][c]) < 1e-8);
      }
    }
  }
}

TEST_CASE("viterbi tie rule") {
  SUBCASE("zero model is all O") {
    CrfModel m = feature_model({"a"});
    CHECK(viterbi(m, SequenceFeatures(6)) == std::vector<TokenLabel>(6, TokenLabel::O));
  }
  SUBCASE("dominant emission at position 1") {
    CrfModel m = feature_model({"W0=hive"});
    m.emission(0, label_index(TokenLabel::T)) = 10.0;
    CHECK(viterbi(m, SequenceFeatures{{}, {0}, {}}) ==
          std::vector<TokenLabel>{TokenLabel::O, TokenLabel::T, TokenLabel::O});
  }
  SUBCASE("integer weights with many exact ties") {
    Rng rng(6);
    for (int trial = 0; trial < 300; ++trial) {
      std::size_t features = 1 + rng.uniform_index(3);
      CrfModel m = random_crf(features, rng, 0, true);
      SequenceFeatures x = random_sequence(features, 1 + rng.uniform_index(8), rng);
      CHECK(viterbi(m, x) == enumerate(m, x).best);
    }
  }
}

TEST_CASE("position shift raises log Z by the constant") {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    CrfModel m = random_crf(4, rng);
    std::size_t len = 1 + rng.uniform_index(8);
    PotentialTable t = potentials(m, random_sequence(4, len, rng));
    PotentialTable shifted = t;
    std::size_t at = rng.uniform_index(len);
    double c = rng.uniform_real(-5, 5);
    for (auto &row : shifted.log_phi[at])
      for (double &v : row) v += c;
    CHECK(std::abs(log_partition(shifted) - log_partition(t) - c) < 1e-9);
    std::vector<TokenLabel> y(len);
    for (auto &l : y) l = rng.uniform_index(2) ? TokenLabel::O : TokenLabel::T;
    CHECK(std::abs(sequence_log_prob(shifted, y) - sequence_log_prob(t, y)) < 1e-9);
  }
}

TEST_CASE("long sequences with large potentials stay finite") {
  Rng rng(99);
  PotentialTable t;
  t.log_phi.resize(10000);
  for (auto &pos : t.log_phi)
    for (auto &row : pos)
      for (double &v : row) v = rng.uniform_real(-50, 50);
  double z = log_partition(t);
  CHECK(std::isfinite(z));
  Marginals mg = marginals(t);
  for (const auto &node : mg.node) {
    CHECK(std::isfinite(node[0]));
    CHECK(std::abs(node[0] + node[1] - 1.0) < 1e-9);
  }
  auto best = viterbi(t);
  CHECK(best.size() == 10000);
  CHECK(std::isfinite(sequence_log_prob(t, best)));
}

TEST_CASE("gradient matches central differences") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    CrfModel m = random_crf(5, rng, 1.0);
    std::vector<CrfExample> data;
    for (int n = 0; n < 3; ++n) {
      CrfExample ex;
      ex.features = random_sequence(5, 1 + rng.uniform_index(5), rng);
      for (std::size_t i = 0; i < ex.features.size(); ++i)
        ex.labels.push_back(rng.uniform_index(2) ? TokenLabel::O : TokenLabel::T);
      data.push_back(ex);
    }
    const double l2 = trial % 2 ? 1.0 : 0.0;
    CrfGradient g = crf_gradient(m, data, l2);
    CHECK(g.objective == doctest::Approx(crf_objective(m, data, l2)));
    const double eps = 1e-5;
    auto check = [&](double &param, double analytic) {
      double saved = param;
      param = saved + eps;
      double up = crf_objective(m, data, l2);
      param = saved - eps;
      double down = crf_objective(m, data, l2);
      param = saved;
      CHECK(rel(analytic, (up - down) / (2 * eps)) < 1e-4);
    };
    for (std::size_t k = 0; k < m.emission.data.size(); ++k)
      check(m.emission.data[k], g.emission.data[k]);
    for (std::size_t k = 0; k < m.transition.data.size(); ++k)
      check(m.transition.data[k], g.transition.data[k]);
  }
}

TEST_CASE("train_crf") {
  FeatureIndex index = FeatureIndex::from_names({"W0=hive", "W0=the", "W0=uses"});
  Rng rng(4);
  auto data = hive_dataset(index, rng);
  CrfTrainConfig config;
  config.epochs = 50;
  config.learning_rate = 1e-2;

  SUBCASE("co-occurring feature learns T") {
    CrfModel m = train_crf(index, data, config);
    int hive = *index.lookup("W0=hive");
    CHECK(m.emission(hive, label_index(TokenLabel::T)) >
          m.emission(hive, label_index(TokenLabel::O)));
    CHECK(viterbi(m, data[0].features) == data[0].labels);
  }
  SUBCASE("epochs = 0 is the zero model") {
    config.epochs = 0;
    CrfModel m = train_crf(index, data, config);
    for (double v : m.emission.data) CHECK(v == 0.0);
    for (double v : m.transition.data) CHECK(v == 0.0);
  }
  SUBCASE("duplicated data at half the rate gives the same first update") {
    config.epochs = 1;
    CrfModel a = train_crf(index, data, config);
    auto doubled = data;
    doubled.insert(doubled.end(), data.begin(), data.end());
    config.learning_rate /= 2;
    CrfModel b = train_crf(index, doubled, config);
    for (std::size_t k = 0; k < a.emission.data.size(); ++k)
      CHECK(b.emission.data[k] == doctest::Approx(a.emission.data[k]).epsilon(1e-12));
    for (std::size_t k = 0; k < a.transition.data.size(); ++k)
      CHECK(b.transition.data[k] == doctest::Approx(a.transition.data[k]).epsilon(1e-12));
  }
  SUBCASE("negative log-likelihood does not increase at a small rate") {
    config.learning_rate = 1e-3;
    config.epochs = 100;
    CrfTrainingLog log;
    train_crf(index, data, config, &log);
    REQUIRE(log.negative_log_likelihood.size() == 101);
    for (std::size_t e = 1; e < log.negative_log_likelihood.size(); ++e)
      CHECK(log.negative_log_likelihood[e] <= log.negative_log_likelihood[e - 1] + 1e-9);
  }
  SUBCASE("thread count does not change the result") {
    std::vector<CrfExample> many;
    for (int k = 0; k < 4; ++k) many.insert(many.end(), data.begin(), data.end());
    Rng r2(8);
    CrfModel probe = random_crf(3, r2);
    CrfGradient one = crf_gradient(probe, many, 1.0, 1);
    CrfGradient four = crf_gradient(probe, many, 1.0, 4);
    CHECK(one.emission == four.emission);
    CHECK(one.transition == four.transition);
    CHECK(one.objective == four.objective);
    config.threads = 3;
    CrfModel a = train_crf(index, many, config);
    config.threads = 1;
    CrfModel b = train_crf(index, many, config);
    CHECK(a.emission == b.emission);
    CHECK(a.transition == b.transition);
  }
  SUBCASE("config errors") {
    CHECK_THROWS_AS(train_crf(index, {}, config), ConfigError);
    config.l2 = -1;
    CHECK_THROWS_AS(train_crf(index, data, config), ConfigError);
  }
}

TEST_CASE("crf model file") {
  Rng rng(17);
  CrfModel m = random_crf(6, rng);
  m.l2 = 0.25;
  std::stringstream buf;
  m.save(buf);
  CrfModel back = CrfModel::load(buf);
  CHECK(back.feature_index.names() == m.feature_index.names());
  CHECK(back.feature_index.frozen());
  CHECK(back.emission == m.emission);
  CHECK(back.transition == m.transition);
  CHECK(back.l2 == 0.25);
  for (int k = 0; k < 20; ++k) {
    auto x = random_sequence(6, 1 + rng.uniform_index(9), rng);
    CHECK(viterbi(back, x) == viterbi(m, x));
  }
  std::string bytes;
  {
    std::stringstream s;
    m.save(s);
    bytes = s.str();
  }
  std::istringstream cut(bytes.substr(0, bytes.size() - 1));
  CHECK_THROWS_AS(CrfModel::load(cut), FormatError);
  std::string bad = bytes;
  bad[3] ^= 1;
  std::istringstream wrong(bad);
  CHECK_THROWS_AS(CrfModel::load(wrong), FormatError);
}
