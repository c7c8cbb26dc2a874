#include "techterm/pipeline.h"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>

#include "techterm/conll.h"
#include "techterm/error.h"
#include "techterm/eval.h"

namespace techterm {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string &key, const std::string &value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("invalid value '" + value + "' for " + key);
  }
  return out;
}

bool parse_bool(const std::string &key, const std::string &value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("invalid boolean '" + value + "' for " + key);
}

using Setter = std::function<void(RunConfig &, const std::string &, const std::string &)>;

const std::map<std::string, Setter> &setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto size = [](std::size_t RunConfig::*field) {
      return [field](RunConfig &c, const std::string &k, const std::string &v) {
        c.*field = parse_number<std::size_t>(k, v);
      };
    };
    t["seed"] = [](RunConfig &c, const std::string &k, const std::string &v) {
      c.seed = parse_number<std::uint64_t>(k, v);
    };
    t["corpus"] = [](RunConfig &c, const std::string &, const std::string &v) { c.corpus = v; };
    t["gazetteer"] = [](RunConfig &c, const std::string &, const std::string &v) {
      c.gazetteer = v;
    };
    t["out_dir"] = [](RunConfig &c, const std::string &, const std::string &v) { c.out_dir = v; };
    t["synth_sentences"] = size(&RunConfig::synth_sentences);
    t["split.train"] = [](RunConfig &c, const std::string &k, const std::string &v) {
      c.ratios.train = parse_number<double>(k, v);
    };
    t["split.validation"] = [](RunConfig &c, const std::string &k, const std::string &v) {
      c.ratios.validation = parse_number<double>(k, v);
    };
    t["split.test"] = [](RunConfig &c, const std::string &k, const std::string &v) {
      c.ratios.test = parse_number<double>(k, v);
    };

#define TT_SIZE(section, key, member)                                              \
  t[section "." #key] = [](RunConfig &c, const std::string &k, const std::string &v) { \
    c.member.key = parse_number<std::size_t>(k, v);                                 \
  };
#define TT_REAL(section, key, member)                                              \
  t[section "." #key] = [](RunConfig &c, const std::string &k, const std::string &v) { \
    c.member.key = parse_number<double>(k, v);                                      \
  };
    TT_SIZE("embeddings", dim, embeddings)
    TT_SIZE("embeddings", window, embeddings)
    TT_SIZE("embeddings", negatives, embeddings)
    TT_SIZE("embeddings", epochs, embeddings)
    TT_REAL("embeddings", learning_rate, embeddings)
    TT_SIZE("embeddings", threads, embeddings)
    t["embeddings.min_count"] = [](RunConfig &c, const std::string &k, const std::string &v) {
      c.embeddings.min_count = parse_number<std::uint64_t>(k, v);
    };
    TT_SIZE("classifier", epochs, classifier)
    TT_REAL("classifier", learning_rate, classifier)
    TT_REAL("classifier", l2, classifier)
    TT_SIZE("classifier", hidden_dim, classifier)
    TT_SIZE("classifier", batch_size, classifier)
    t["classifier.use_hidden"] = [](RunConfig &c, const std::string &k, const std::string &v) {
      c.classifier.use_hidden = parse_bool(k, v);
    };
    TT_SIZE("crf", epochs, crf)
    TT_REAL("crf", learning_rate, crf)
    TT_REAL("crf", l2, crf)
    TT_SIZE("crf", threads, crf)
    TT_SIZE("features", ngram_min, features)
    TT_SIZE("features", ngram_max, features)
    TT_SIZE("features", window, features)
#undef TT_SIZE
#undef TT_REAL
    t["features.min_count"] = size(&RunConfig::feature_min_count);
    return t;
  }();
  return table;
}

void set_key(RunConfig &config, const std::string &key, const std::string &value) {
  std::string lookup = key.rfind("general.", 0) == 0 ? key.substr(8) : key;
  auto it = setters().find(lookup);
  if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
  it->second(config, key, value);
}

}  // namespace

RunConfig default_run_config() {
  RunConfig c;
  c.embeddings.dim = 300;
  c.embeddings.window = 5;
  c.embeddings.negatives = 5;
  c.embeddings.epochs = 5;
  c.embeddings.learning_rate = 0.025;
  c.embeddings.min_count = 1;
  c.classifier.epochs = 50;
  c.classifier.learning_rate = 0.1;
  c.classifier.batch_size = 32;
  c.crf.epochs = 200;
  c.crf.learning_rate = 3e-4;
  c.crf.l2 = 1.0;
  return c;
}

void apply_config(std::istream &in, RunConfig &config) {
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string text = trim(line);
    if (text.empty() || text[0] == '#' || text[0] == ';') continue;
    try {
      if (text.front() == '[') {
        if (text.back() != ']') throw ConfigError("unterminated section header");
        section = trim(std::string_view(text).substr(1, text.size() - 2));
        if (section == "general") section.clear();
        continue;
      }
      std::size_t eq = text.find('=');
      if (eq == std::string::npos) throw ConfigError("expected key = value");
      std::string key = trim(std::string_view(text).substr(0, eq));
      std::string value = trim(std::string_view(text).substr(eq + 1));
      set_key(config, section.empty() ? key : section + "." + key, value);
    } catch (const ConfigError &e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void apply_config_file(const std::string &path, RunConfig &config) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  apply_config(in, config);
}

void apply_override(const std::string &assignment, RunConfig &config) {
  std::size_t eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override '" + assignment + "' must be section.key=value");
  }
  set_key(config, trim(std::string_view(assignment).substr(0, eq)),
          trim(std::string_view(assignment).substr(eq + 1)));
}

void validate(const RunConfig &c) {
  validate_ratios(c.ratios);
  if (c.embeddings.dim == 0 || c.embeddings.window == 0 ||
      c.embeddings.negatives == 0 || c.embeddings.min_count == 0 ||
      !(c.embeddings.learning_rate > 0.0)) {
    throw ConfigError("embedding hyperparameters must be positive");
  }
  if (!(c.classifier.learning_rate > 0.0) || !(c.classifier.l2 >= 0.0)) {
    throw ConfigError("classifier learning_rate must be positive and l2 non-negative");
  }
  if (!(c.crf.learning_rate > 0.0) || !(c.crf.l2 >= 0.0)) {
    throw ConfigError("crf learning_rate must be positive and l2 non-negative");
  }
  if (c.features.ngram_min == 0 || c.features.ngram_min > c.features.ngram_max) {
    throw ConfigError("features n-gram range is invalid");
  }
  if (c.feature_min_count == 0) throw ConfigError("features.min_count must be positive");
  if (c.synth_sentences == 0) throw ConfigError("synth_sentences must be positive");
}

std::vector<Sentence> sentences_of(const std::vector<LabeledSentence> &data) {
  std::vector<Sentence> out;
  out.reserve(data.size());
  for (const auto &ls : data) out.push_back(ls.sentence);
  return out;
}

std::vector<ClassifierExample> classifier_examples(
    const EmbeddingModel &embeddings, const std::vector<LabeledSentence> &data) {
  std::vector<ClassifierExample> out;
  out.reserve(data.size());
  for (const auto &ls : data) {
    out.push_back({embed_sentence(embeddings, ls.sentence).values, ls.sentence_label});
  }
  return out;
}

CrfDataset crf_dataset(const std::vector<LabeledSentence> &data,
                       const FeatureConfig &features, std::size_t min_count) {
  OrthographicTagger tagger;
  std::vector<std::vector<SparseFeatures>> sparse;
  std::vector<const LabeledSentence *> kept;
  for (const auto &ls : data) {
    if (ls.sentence_label != SentenceLabel::ContainsTech) continue;
    sparse.push_back(sentence_features(ls.sentence, tagger, features));
    kept.push_back(&ls);
  }
  CrfDataset out;
  out.index = FeatureIndex::build(sparse, min_count);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    CrfExample ex;
    for (const auto &pos : sparse[i]) ex.features.push_back(out.index.encode(pos));
    ex.labels = kept[i]->token_labels;
    out.examples.push_back(std::move(ex));
  }
  return out;
}

PipelineResult run_pipeline(const RunConfig &config, std::ostream &log) {
  validate(config);
  const auto started = std::chrono::steady_clock::now();
  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  auto path = [&](const char *name) { return (fs::path(config.out_dir) / name).string(); };

  Gazetteer gazetteer = Gazetteer::load_file(config.gazetteer);
  std::vector<Document> docs;
  if (config.corpus.empty()) {
    SynthConfig sc;
    sc.sentences = config.synth_sentences;
    sc.seed = config.seed;
    SynthCorpus synth = synthesize(gazetteer, sc);
    docs = std::move(synth.documents);
    std::ofstream corpus_out(path("corpus.jsonl"), std::ios::binary);
    write_corpus_jsonl(corpus_out, docs);
    write_conll_file(path("gold.tsv"), synth.gold);
    log << "synthesized " << config.synth_sentences << " sentences in "
        << docs.size() << " documents\n";
  } else {
    docs = read_corpus_file(config.corpus);
  }

  PipelineResult result;
  std::vector<LabeledSentence> annotated = annotate_corpus(docs, gazetteer);
  write_conll_file(path("annotated.tsv"), annotated);
  result.before_balance = count_classes(annotated);
  std::vector<LabeledSentence> balanced = balance(annotated, config.seed);
  result.after_balance = count_classes(balanced);
  log << "class counts before balancing: " << result.before_balance.positive
      << " positive, " << result.before_balance.negative << " negative\n"
      << "class counts after balancing:  " << result.after_balance.positive
      << " positive, " << result.after_balance.negative << " negative\n";

  DatasetSplit split = split_dataset(balanced, config.ratios, config.seed);
  write_conll_file(path("train.tsv"), split.train);
  write_conll_file(path("valid.tsv"), split.validation);
  write_conll_file(path("test.tsv"), split.test);
  result.train_size = split.train.size();
  result.validation_size = split.validation.size();
  result.test_size = split.test.size();
  log << "split: " << result.train_size << " train, " << result.validation_size
      << " validation, " << result.test_size << " test\n";

  auto models = std::make_shared<PipelineModels>();
  models->features = config.features;

  SkipgramConfig emb = config.embeddings;
  emb.seed = config.seed;
  models->embeddings = train_skipgram(sentences_of(annotated), emb);
  models->embeddings.save_file(path("embeddings.bin"));
  log << "embeddings: " << models->embeddings.vocab().size() << " words, dim "
      << models->embeddings.dim() << "\n";

  ClassifierConfig clf = config.classifier;
  clf.seed = config.seed;
  auto train_x = classifier_examples(models->embeddings, split.train);
  auto valid_x = classifier_examples(models->embeddings, split.validation);
  ClassifierTrainingLog clf_log;
  models->classifier = train_classifier(train_x, valid_x, clf, &clf_log);
  models->classifier.save_file(path("classifier.bin"));
  log << "classifier: best epoch " << clf_log.best_epoch << ", validation F "
      << clf_log.validation_f[clf_log.best_epoch] << "\n";

  CrfTrainConfig crf_config = config.crf;
  crf_config.seed = config.seed;
  CrfDataset crf_data = crf_dataset(split.train, config.features, config.feature_min_count);
  CrfTrainingLog crf_log;
  models->crf = train_crf(std::move(crf_data.index), crf_data.examples, crf_config, &crf_log);
  models->crf.save_file(path("crf.bin"));
  result.crf_nll = crf_log.negative_log_likelihood;
  log << "crf: " << models->crf.num_features() << " features, final NLL "
      << crf_log.negative_log_likelihood.back() << "\n";

  Cascade cascade(models);
  result.stage1 = evaluate_stage1(cascade, split.test);
  result.stage2 = evaluate_stage2(cascade, split.test);
  result.end_to_end = evaluate_end_to_end(cascade, split.test);
  result.spans = evaluate_spans(cascade, split.test);
  {
    // Stage I replaced by the gold label of each test sentence.
    ConfusionCounts c;
    for (const auto &ls : split.test) {
      if (ls.sentence_label == SentenceLabel::ContainsTech) {
        c += count_tokens(ls.token_labels, cascade.tag(ls.sentence));
      } else {
        c += count_tokens(ls.token_labels,
                          std::vector<TokenLabel>(ls.token_labels.size(), TokenLabel::O));
      }
    }
    result.gold_gated = f_score(c, EvalMode::kEndToEnd);
  }

  nlohmann::json report = {{"stage1", to_json(result.stage1)},
                           {"stage2", to_json(result.stage2)},
                           {"end_to_end", to_json(result.end_to_end)},
                           {"spans", to_json(result.spans)},
                           {"gold_gated", to_json(result.gold_gated)},
                           {"crf_nll", result.crf_nll},
                           {"class_counts",
                            {{"before", {result.before_balance.positive,
                                         result.before_balance.negative}},
                             {"after", {result.after_balance.positive,
                                        result.after_balance.negative}}}}};
  std::ofstream(path("report.json")) << report.dump(2) << '\n';
  log << format_table(result.stage1) << format_table(result.stage2)
      << format_table(result.end_to_end) << format_table(result.spans);

  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace techterm
