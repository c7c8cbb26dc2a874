#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "techterm/error.h"
#include "techterm/pipeline.h"
#include "test_util.h"

using namespace techterm;
using techterm::testing::data_path;

TEST_CASE("config file") {
  RunConfig c = default_run_config();
  std::istringstream in(R"(# comment
seed = 7
gazetteer = terms.txt

[embeddings]
dim = 100
learning_rate = 0.05

[classifier]
use_hidden = true
; another comment
[crf]
epochs = 12
[split]
train = 0.8
validation = 0.1
test = 0.1
[features]
min_count = 3
)");
  apply_config(in, c);
  CHECK(c.seed == 7);
  CHECK(c.gazetteer == "terms.txt");
  CHECK(c.embeddings.dim == 100);
  CHECK(c.embeddings.learning_rate == 0.05);
  CHECK(c.classifier.use_hidden);
  CHECK(c.crf.epochs == 12);
  CHECK(c.ratios.train == 0.8);
  CHECK(c.feature_min_count == 3);
  CHECK_NOTHROW(validate(c));

  SUBCASE("overrides win") {
    apply_override("crf.epochs=40", c);
    apply_override("seed = 9", c);
    CHECK(c.crf.epochs == 40);
    CHECK(c.seed == 9);
  }
  SUBCASE("errors carry the line number") {
    std::istringstream bad("seed = 1\n[crf]\nmomentum = 0.9\n");
    try {
      apply_config(bad, c);
      FAIL("expected ConfigError");
    } catch (const ConfigError &e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    std::istringstream nan("[crf]\nepochs = many\n");
    CHECK_THROWS_AS(apply_config(nan, c), ConfigError);
    CHECK_THROWS_AS(apply_override("crf.epochs", c), ConfigError);
    CHECK_THROWS_AS(apply_override("nope.key=1", c), ConfigError);
  }
  SUBCASE("validation") {
    c.ratios.test = 0.3;
    CHECK_THROWS_AS(validate(c), RatioError);
    c = default_run_config();
    c.crf.learning_rate = 0;
    CHECK_THROWS_AS(validate(c), ConfigError);
  }
}

TEST_CASE("run_pipeline on a small synthetic corpus") {
  namespace fs = std::filesystem;
  fs::path out = fs::temp_directory_path() / "techterm_pipeline_test";
  fs::remove_all(out);
  RunConfig c = default_run_config();
  c.gazetteer = data_path("gazetteer.txt");
  c.out_dir = out.string();
  c.synth_sentences = 2000;
  c.embeddings.dim = 64;
  c.crf.epochs = 60;
  std::ostringstream log;
  PipelineResult r = run_pipeline(c, log);

  CHECK(r.after_balance.positive == r.after_balance.negative);
  CHECK(r.train_size + r.validation_size + r.test_size ==
        r.after_balance.positive + r.after_balance.negative);
  for (const char *name : {"corpus.jsonl", "gold.tsv", "annotated.tsv", "train.tsv",
                           "valid.tsv", "test.tsv", "embeddings.bin", "classifier.bin",
                           "crf.bin", "report.json"})
    CHECK_MESSAGE(fs::exists(out / name), name);
  CHECK(r.stage1.f_score >= 0.9);
  CHECK(r.stage2.f_score >= 0.9);
  CHECK(r.end_to_end.f_score <= r.gold_gated.f_score + 1e-12);
  REQUIRE(r.crf_nll.size() == 61);
  for (std::size_t e = 1; e < r.crf_nll.size(); ++e) CHECK(r.crf_nll[e] <= r.crf_nll[e - 1]);

  std::ifstream report(out / "report.json");
  auto j = nlohmann::json::parse(report);
  CHECK(j.contains("stage1"));
  CHECK(j["stage2"]["mode"] == "token");

  CHECK(log.str().find("class counts before balancing") != std::string::npos);
  fs::remove_all(out);
}
