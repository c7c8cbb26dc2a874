// techterm: command-line driver for the terminology extraction cascade.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "techterm/cascade.h"
#include "techterm/classifier.h"
#include "techterm/conll.h"
#include "techterm/corpus.h"
#include "techterm/crf.h"
#include "techterm/embeddings.h"
#include "techterm/error.h"
#include "techterm/eval.h"
#include "techterm/pipeline.h"
#include "techterm/render.h"
#include "techterm/synth.h"

namespace {

using namespace techterm;

constexpr const char *kConfigEnv = "TECHTERM_CONFIG";

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out;
};

RunConfig resolve_config(const Common &common) {
  RunConfig config = default_run_config();
  std::string path = common.config;
  if (path.empty()) {
    if (const char *env = std::getenv(kConfigEnv)) path = env;
  }
  if (!path.empty()) apply_config_file(path, config);
  for (const auto &o : common.overrides) apply_override(o, config);
  if (common.seed_given) config.seed = common.seed;
  validate(config);
  return config;
}

void add_common(CLI::App *cmd, Common &common, bool with_out = true) {
  cmd->add_option("--config", common.config,
                  std::string("Config file (default: $") + kConfigEnv + ")");
  cmd->add_option("--set", common.overrides, "Override a config key: section.key=value");
  cmd->add_option_function<std::uint64_t>(
      "--seed",
      [&common](std::uint64_t s) {
        common.seed = s;
        common.seed_given = true;
      },
      "Random seed");
  if (with_out) cmd->add_option("--out", common.out, "Output path");
}

std::ofstream open_out(const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  return out;
}

std::shared_ptr<PipelineModels> load_models(const std::string &emb,
                                            const std::string &clf,
                                            const std::string &crf,
                                            const RunConfig &config) {
  auto models = std::make_shared<PipelineModels>();
  models->embeddings = EmbeddingModel::load_file(emb);
  models->classifier = ClassifierModel::load_file(clf);
  models->crf = CrfModel::load_file(crf);
  models->features = config.features;
  return models;
}

// --- annotate ---------------------------------------------------------------

struct AnnotateArgs {
  std::string corpus, gazetteer, split_dir;
};

int run_annotate(const AnnotateArgs &args, const Common &common) {
  RunConfig config = resolve_config(common);
  if (common.out.empty()) throw ConfigError("annotate needs --out");
  Gazetteer gazetteer = Gazetteer::load_file(args.gazetteer);
  auto docs = read_corpus_file(args.corpus);
  auto annotated = annotate_corpus(docs, gazetteer);
  write_conll_file(common.out, annotated);

  ClassCounts before = count_classes(annotated);
  std::cout << "before balancing: " << before.positive << " positive, "
            << before.negative << " negative\n";
  if (before.positive == 0 || before.negative == 0) {
    std::cout << "after balancing:  skipped (one class is empty)\n";
    return 0;
  }
  auto balanced = balance(annotated, config.seed);
  ClassCounts after = count_classes(balanced);
  std::cout << "after balancing:  " << after.positive << " positive, "
            << after.negative << " negative\n";
  if (!args.split_dir.empty()) {
    std::filesystem::create_directories(args.split_dir);
    DatasetSplit split = split_dataset(balanced, config.ratios, config.seed);
    auto dir = std::filesystem::path(args.split_dir);
    write_conll_file((dir / "train.tsv").string(), split.train);
    write_conll_file((dir / "valid.tsv").string(), split.validation);
    write_conll_file((dir / "test.tsv").string(), split.test);
    std::cout << "split: " << split.train.size() << " train, "
              << split.validation.size() << " validation, " << split.test.size()
              << " test\n";
  }
  return 0;
}

// --- train -------------------------------------------------------------------

struct TrainArgs {
  std::string stage, corpus, train, valid, embeddings;
};

int run_train(const TrainArgs &args, const Common &common) {
  RunConfig config = resolve_config(common);
  if (common.out.empty()) throw ConfigError("train needs --out");

  if (args.stage == "embeddings") {
    std::vector<Sentence> sentences;
    if (!args.corpus.empty()) {
      for (const auto &doc : read_corpus_file(args.corpus)) {
        for (auto &s : split_sentences(doc.text, doc.id)) sentences.push_back(std::move(s));
      }
    } else if (!args.train.empty()) {
      sentences = sentences_of(read_conll_file(args.train));
    } else {
      throw ConfigError("embeddings training needs --corpus or --train");
    }
    SkipgramConfig emb = config.embeddings;
    emb.seed = config.seed;
    EmbeddingModel model = train_skipgram(sentences, emb);
    model.save_file(common.out);
    std::cout << "embeddings: " << model.vocab().size() << " words, dim " << model.dim()
              << " -> " << common.out << "\n";
    return 0;
  }

  if (args.train.empty()) throw ConfigError(args.stage + " training needs --train");
  auto train = read_conll_file(args.train);
  std::vector<LabeledSentence> valid;
  if (!args.valid.empty()) valid = read_conll_file(args.valid);

  if (args.stage == "classifier") {
    if (args.embeddings.empty()) {
      throw IoError("classifier training needs an embeddings file (--embeddings)");
    }
    EmbeddingModel emb = EmbeddingModel::load_file(args.embeddings);
    ClassifierConfig clf = config.classifier;
    clf.seed = config.seed;
    auto train_x = classifier_examples(emb, train);
    auto valid_x = classifier_examples(emb, valid);
    ClassifierTrainingLog log;
    ClassifierModel model = train_classifier(train_x, valid_x, clf, &log);
    model.save_file(common.out);
    EvalReport tr = evaluate_stage1(
        [&](const Sentence &s) {
          return predict(model, embed_sentence(emb, s).values).label;
        },
        train);
    std::cout << "classifier: train F " << tr.f_score << ", validation F "
              << log.validation_f[log.best_epoch] << " (epoch " << log.best_epoch
              << ") -> " << common.out << "\n";
    return 0;
  }

  if (args.stage == "crf") {
    CrfDataset data = crf_dataset(train, config.features, config.feature_min_count);
    CrfTrainConfig crf = config.crf;
    crf.seed = config.seed;
    CrfTrainingLog log;
    CrfModel model = train_crf(std::move(data.index), data.examples, crf, &log);
    model.save_file(common.out);
    for (std::size_t e = 0; e < log.negative_log_likelihood.size(); ++e) {
      std::cout << "epoch " << e << " nll " << log.negative_log_likelihood[e] << "\n";
    }
    SequencePredictor tag = [&](const Sentence &s) {
      return viterbi(model, model.encode(sentence_features(s, OrthographicTagger{},
                                                           config.features)));
    };
    std::cout << "crf: train token F " << evaluate_stage2(tag, train).f_score;
    if (!valid.empty()) {
      std::cout << ", validation token F " << evaluate_stage2(tag, valid).f_score;
    }
    std::cout << " -> " << common.out << "\n";
    return 0;
  }
  throw ConfigError("unknown stage '" + args.stage + "'");
}

// --- extract -----------------------------------------------------------------

struct ModelArgs {
  std::string embeddings, classifier, crf;
};

struct ExtractArgs {
  std::string input, format = "jsonl", gold;
};

int run_extract(const ExtractArgs &args, const ModelArgs &m, const Common &common) {
  RunConfig config = resolve_config(common);
  Cascade cascade(load_models(m.embeddings, m.classifier, m.crf, config));
  auto docs = read_corpus_file(args.input);

  std::map<std::string, std::vector<LabeledSentence>> gold_by_doc;
  if (!args.gold.empty()) {
    if (args.format == "jsonl") throw ConfigError("--gold applies to ansi and html output");
    for (auto &ls : read_conll_file(args.gold)) {
      gold_by_doc[ls.sentence.doc_id].push_back(std::move(ls));
    }
  }

  std::ofstream file;
  if (!common.out.empty()) file = open_out(common.out);
  std::ostream &out = common.out.empty() ? std::cout : file;

  for (const auto &doc : docs) {
    std::vector<Sentence> sentences = split_sentences(doc.text, doc.id);
    std::vector<Extraction> extractions = cascade.extract_from_sentences(sentences);
    if (args.format == "jsonl") {
      write_extractions_jsonl(out, extractions);
      continue;
    }
    std::vector<std::vector<TokenLabel>> gold;
    if (!args.gold.empty()) {
      const auto &g = gold_by_doc[doc.id];
      if (g.size() != sentences.size()) {
        throw FormatError("gold file has " + std::to_string(g.size()) +
                          " sentences for document '" + doc.id + "', expected " +
                          std::to_string(sentences.size()));
      }
      for (std::size_t s = 0; s < sentences.size(); ++s) {
        const auto &gt = g[s].sentence.tokens;
        bool same = gt.size() == sentences[s].tokens.size();
        for (std::size_t i = 0; same && i < gt.size(); ++i) {
          same = gt[i].text == sentences[s].tokens[i].text;
        }
        if (!same) {
          throw FormatError("gold tokens differ from document '" + doc.id +
                            "' sentence " + std::to_string(s));
        }
        gold.push_back(g[s].token_labels);
      }
    }
    RenderInput in{&doc, &sentences, &extractions, gold.empty() ? nullptr : &gold};
    if (args.format == "ansi") {
      out << render(in, RenderFormat::kAnsi) << '\n';
    } else if (args.format == "html") {
      out << render(in, RenderFormat::kHtml) << '\n';
    } else {
      throw ConfigError("unknown format '" + args.format + "'");
    }
  }
  return 0;
}

// --- evaluate ----------------------------------------------------------------

struct EvaluateArgs {
  std::string test, mode = "end_to_end";
};

int run_evaluate(const EvaluateArgs &args, const ModelArgs &m, const Common &common) {
  RunConfig config = resolve_config(common);
  EvalMode mode = parse_mode(args.mode);
  auto test = read_conll_file(args.test);
  Cascade cascade(load_models(m.embeddings, m.classifier, m.crf, config));
  EvalReport report;
  switch (mode) {
    case EvalMode::kSentence:
      report = evaluate_stage1(cascade, test);
      break;
    case EvalMode::kToken:
      report = evaluate_stage2(cascade, test);
      break;
    case EvalMode::kEndToEnd:
      report = evaluate_end_to_end(cascade, test);
      break;
    case EvalMode::kSpan:
      report = evaluate_spans(cascade, test);
      break;
  }
  std::cout << format_table(report);
  if (!common.out.empty()) open_out(common.out) << to_json(report).dump(2) << '\n';
  return 0;
}

// --- synth -------------------------------------------------------------------

struct SynthArgs {
  std::string gazetteer, gold;
  std::size_t sentences = 1000;
};

int run_synth(const SynthArgs &args, const Common &common) {
  RunConfig config = resolve_config(common);
  if (common.out.empty()) throw ConfigError("synth needs --out");
  Gazetteer gazetteer = Gazetteer::load_file(args.gazetteer);
  SynthConfig sc;
  sc.sentences = args.sentences;
  sc.seed = config.seed;
  SynthCorpus corpus = synthesize(gazetteer, sc);
  {
    std::ofstream out = open_out(common.out);
    write_corpus_jsonl(out, corpus.documents);
  }
  if (!args.gold.empty()) write_conll_file(args.gold, corpus.gold);
  ClassCounts c = count_classes(corpus.gold);
  std::cout << "synthesized " << corpus.gold.size() << " sentences (" << c.positive
            << " positive) in " << corpus.documents.size() << " documents\n";
  return 0;
}

// --- pipeline ----------------------------------------------------------------

struct PipelineArgs {
  std::string corpus, gazetteer;
};

int run_pipeline_cmd(const PipelineArgs &args, const Common &common) {
  RunConfig config = resolve_config(common);
  if (!args.corpus.empty()) config.corpus = args.corpus;
  if (!args.gazetteer.empty()) config.gazetteer = args.gazetteer;
  if (!common.out.empty()) config.out_dir = common.out;
  if (config.gazetteer.empty()) throw ConfigError("pipeline needs a gazetteer");
  PipelineResult r = run_pipeline(config, std::cout);
  std::cout << "finished in " << r.seconds << " s; artifacts in " << config.out_dir
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Two-stage technology term extraction"};
  app.require_subcommand(1);

  Common common;
  ModelArgs models;
  auto add_models = [&](CLI::App *cmd) {
    cmd->add_option("--embeddings", models.embeddings, "Embedding model")->required();
    cmd->add_option("--classifier", models.classifier, "Classifier model")->required();
    cmd->add_option("--crf", models.crf, "CRF model")->required();
  };

  AnnotateArgs annotate;
  auto *annotate_cmd = app.add_subcommand("annotate", "Annotate a corpus with a gazetteer");
  annotate_cmd->add_option("--corpus", annotate.corpus, "Corpus JSON-lines")->required();
  annotate_cmd->add_option("--gazetteer", annotate.gazetteer, "Gazetteer file")->required();
  annotate_cmd->add_option("--split-dir", annotate.split_dir,
                           "Write balanced train/valid/test TSVs here");
  add_common(annotate_cmd, common);

  TrainArgs train;
  auto *train_cmd = app.add_subcommand("train", "Train one stage");
  train_cmd->add_option("--stage", train.stage, "embeddings | classifier | crf")
      ->required()
      ->check(CLI::IsMember({"embeddings", "classifier", "crf"}));
  train_cmd->add_option("--corpus", train.corpus, "Corpus JSON-lines (embeddings)");
  train_cmd->add_option("--train", train.train, "Training TSV");
  train_cmd->add_option("--valid", train.valid, "Validation TSV");
  train_cmd->add_option("--embeddings", train.embeddings, "Embedding model (classifier)");
  add_common(train_cmd, common);

  ExtractArgs extract;
  auto *extract_cmd = app.add_subcommand("extract", "Run the cascade over documents");
  extract_cmd->add_option("--input", extract.input, "Corpus JSON-lines")->required();
  extract_cmd->add_option("--format", extract.format, "jsonl | ansi | html")
      ->check(CLI::IsMember({"jsonl", "ansi", "html"}));
  extract_cmd->add_option("--gold", extract.gold, "Gold TSV for missed-term marks");
  add_models(extract_cmd);
  add_common(extract_cmd, common);

  EvaluateArgs evaluate;
  auto *evaluate_cmd = app.add_subcommand("evaluate", "Score models on a test TSV");
  evaluate_cmd->add_option("--test", evaluate.test, "Test TSV")->required();
  evaluate_cmd->add_option("--mode", evaluate.mode, "sentence | token | end_to_end | span");
  add_models(evaluate_cmd);
  add_common(evaluate_cmd, common);

  SynthArgs synth;
  auto *synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth_cmd->add_option("--gazetteer", synth.gazetteer, "Gazetteer file")->required();
  synth_cmd->add_option("--sentences", synth.sentences, "Number of sentences");
  synth_cmd->add_option("--gold", synth.gold, "Write gold TSV here");
  add_common(synth_cmd, common);

  PipelineArgs pipeline;
  auto *pipeline_cmd = app.add_subcommand("pipeline", "Run every stage end to end");
  pipeline_cmd->add_option("--corpus", pipeline.corpus, "Corpus JSON-lines (default: synth)");
  pipeline_cmd->add_option("--gazetteer", pipeline.gazetteer, "Gazetteer file");
  add_common(pipeline_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*annotate_cmd) return run_annotate(annotate, common);
    if (*train_cmd) return run_train(train, common);
    if (*extract_cmd) return run_extract(extract, models, common);
    if (*evaluate_cmd) return run_evaluate(evaluate, models, common);
    if (*synth_cmd) return run_synth(synth, common);
    if (*pipeline_cmd) return run_pipeline_cmd(pipeline, common);
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
