#include "techterm/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "techterm/error.h"
#include "techterm/rng.h"
#include "techterm/text.h"

namespace techterm {

char label_char(TokenLabel label) { return label == TokenLabel::T ? 'T' : 'O'; }

TokenLabel parse_token_label(std::string_view text) {
  if (text == "T") return TokenLabel::T;
  if (text == "O") return TokenLabel::O;
  throw FormatError("invalid token label '" + std::string(text) + "'");
}

const char *label_name(SentenceLabel label) {
  return label == SentenceLabel::ContainsTech ? "ContainsTech" : "NoTech";
}

SentenceLabel derive_sentence_label(const std::vector<TokenLabel> &labels) {
  bool any = std::any_of(labels.begin(), labels.end(),
                         [](TokenLabel l) { return l == TokenLabel::T; });
  return any ? SentenceLabel::ContainsTech : SentenceLabel::NoTech;
}

LabeledSentence make_labeled(Sentence sentence, std::vector<TokenLabel> labels) {
  if (labels.size() != sentence.tokens.size()) {
    throw LengthMismatch("label count " + std::to_string(labels.size()) +
                         " != token count " +
                         std::to_string(sentence.tokens.size()));
  }
  LabeledSentence out;
  out.sentence_label = derive_sentence_label(labels);
  out.sentence = std::move(sentence);
  out.token_labels = std::move(labels);
  return out;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  auto emit = [&](std::size_t b, std::size_t e) {
    tokens.push_back(Token{std::string(text.substr(b, e - b)), b, e});
  };
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && is_ascii_space(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= n) break;
    std::size_t begin = i;
    while (i < n && !is_ascii_space(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t end = i;

    std::size_t core_begin = begin;
    while (core_begin < end &&
           is_ascii_punct(static_cast<unsigned char>(text[core_begin]))) {
      ++core_begin;
    }
    std::size_t core_end = end;
    while (core_end > core_begin &&
           is_ascii_punct(static_cast<unsigned char>(text[core_end - 1]))) {
      --core_end;
    }
    for (std::size_t p = begin; p < core_begin; ++p) emit(p, p + 1);
    if (core_begin < core_end) emit(core_begin, core_end);
    for (std::size_t p = core_end; p < end; ++p) emit(p, p + 1);
  }
  return tokens;
}

namespace {

bool is_terminator(const Token &tok) {
  return tok.text == "." || tok.text == "!" || tok.text == "?";
}

bool is_abbreviation(const Token &word) {
  if (word.text.size() == 1 &&
      is_ascii_upper(static_cast<unsigned char>(word.text[0]))) {
    return true;
  }
  std::string folded = case_fold(word.text);
  return folded == "e.g" || folded == "i.e" || folded == "etc";
}

}  // namespace

std::vector<Sentence> split_sentences(std::string_view text,
                                      std::string_view doc_id) {
  std::vector<Token> tokens = tokenize(text);
  std::vector<Sentence> sentences;
  Sentence current;
  auto flush = [&]() {
    if (current.tokens.empty()) return;
    current.doc_id = std::string(doc_id);
    current.index = sentences.size();
    sentences.push_back(std::move(current));
    current = Sentence{};
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token &tok = tokens[i];
    current.tokens.push_back(tok);
    if (!is_terminator(tok) || i + 1 == tokens.size()) continue;
    const Token &next = tokens[i + 1];
    if (next.start == tok.end) continue;
    if (!is_ascii_upper(static_cast<unsigned char>(next.text[0]))) continue;
    if (tok.text == "." && current.tokens.size() >= 2) {
      const Token &prev = current.tokens[current.tokens.size() - 2];
      if (prev.end == tok.start && is_abbreviation(prev)) continue;
    }
    flush();
  }
  flush();
  return sentences;
}

Gazetteer Gazetteer::load(std::istream &in) {
  Gazetteer g;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = 0;
    while (first < line.size() &&
           is_ascii_space(static_cast<unsigned char>(line[first]))) {
      ++first;
    }
    if (first == line.size() || line[first] == '#') continue;
    std::vector<Token> tokens = tokenize(line);
    Entry entry;
    entry.reserve(tokens.size());
    for (const Token &t : tokens) entry.push_back(case_fold(t.text));
    if (g.entries_.insert(entry).second) {
      std::size_t last = line.size();
      while (last > first &&
             is_ascii_space(static_cast<unsigned char>(line[last - 1]))) {
        --last;
      }
      g.surfaces_.push_back(line.substr(first, last - first));
      g.max_length_ = std::max(g.max_length_, entry.size());
    }
  }
  if (g.entries_.empty()) throw EmptyGazetteer("gazetteer has no entries");
  return g;
}

Gazetteer Gazetteer::load_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open gazetteer '" + path + "'");
  return load(in);
}

Gazetteer Gazetteer::from_terms(const std::vector<std::string> &terms) {
  std::stringstream ss;
  for (const auto &t : terms) ss << t << '\n';
  return load(ss);
}

LabeledSentence annotate(const Sentence &sentence, const Gazetteer &gazetteer) {
  const std::size_t n = sentence.tokens.size();
  std::vector<std::string> folded;
  folded.reserve(n);
  for (const Token &t : sentence.tokens) folded.push_back(case_fold(t.text));

  std::vector<TokenLabel> labels(n, TokenLabel::O);
  Gazetteer::Entry probe;
  std::size_t i = 0;
  while (i < n) {
    std::size_t matched = 0;
    for (std::size_t len = std::min(gazetteer.max_length(), n - i); len > 0;
         --len) {
      probe.assign(folded.begin() + i, folded.begin() + i + len);
      if (gazetteer.contains(probe)) {
        matched = len;
        break;
      }
    }
    if (matched == 0) {
      ++i;
      continue;
    }
    std::fill_n(labels.begin() + i, matched, TokenLabel::T);
    i += matched;
  }
  return make_labeled(sentence, std::move(labels));
}

ClassCounts count_classes(const std::vector<LabeledSentence> &sentences) {
  ClassCounts c;
  for (const auto &s : sentences) {
    if (s.sentence_label == SentenceLabel::ContainsTech) {
      ++c.positive;
    } else {
      ++c.negative;
    }
  }
  return c;
}

std::vector<LabeledSentence> balance(const std::vector<LabeledSentence> &sentences,
                                     std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    (sentences[i].sentence_label == SentenceLabel::ContainsTech ? pos : neg)
        .push_back(i);
  }
  if (pos.empty() || neg.empty()) {
    throw DegenerateDataset("cannot balance: " + std::to_string(pos.size()) +
                            " positive, " + std::to_string(neg.size()) +
                            " negative sentences");
  }
  Rng rng(seed);
  std::vector<std::size_t> &minority = pos.size() <= neg.size() ? pos : neg;
  std::vector<std::size_t> &majority = pos.size() <= neg.size() ? neg : pos;
  rng.shuffle(std::span<std::size_t>(majority));
  majority.resize(minority.size());

  std::vector<std::size_t> keep(minority);
  keep.insert(keep.end(), majority.begin(), majority.end());
  std::sort(keep.begin(), keep.end());
  rng.shuffle(std::span<std::size_t>(keep));

  std::vector<LabeledSentence> out;
  out.reserve(keep.size());
  for (std::size_t i : keep) out.push_back(sentences[i]);
  return out;
}

void validate_ratios(const SplitRatios &r) {
  for (double v : {r.train, r.validation, r.test}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw RatioError("split ratios must be positive");
    }
  }
  if (std::abs(r.train + r.validation + r.test - 1.0) > 1e-9) {
    throw RatioError("split ratios must sum to 1");
  }
}

DatasetSplit split_dataset(const std::vector<LabeledSentence> &sentences,
                           const SplitRatios &ratios, std::uint64_t seed) {
  validate_ratios(ratios);
  std::vector<std::size_t> by_class[kNumSentenceClasses];
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    by_class[static_cast<int>(sentences[i].sentence_label)].push_back(i);
  }
  Rng rng(seed);
  std::vector<std::size_t> parts[3];
  for (auto &members : by_class) {
    rng.shuffle(std::span<std::size_t>(members));
    const std::size_t n = members.size();
    auto n_train = static_cast<std::size_t>(std::llround(n * ratios.train));
    auto n_val = static_cast<std::size_t>(std::llround(n * ratios.validation));
    n_train = std::min(n_train, n);
    n_val = std::min(n_val, n - n_train);
    parts[0].insert(parts[0].end(), members.begin(), members.begin() + n_train);
    parts[1].insert(parts[1].end(), members.begin() + n_train,
                    members.begin() + n_train + n_val);
    parts[2].insert(parts[2].end(), members.begin() + n_train + n_val,
                    members.end());
  }
  DatasetSplit split;
  split.seed = seed;
  std::vector<LabeledSentence> *outs[3] = {&split.train, &split.validation,
                                           &split.test};
  for (int p = 0; p < 3; ++p) {
    rng.shuffle(std::span<std::size_t>(parts[p]));
    outs[p]->reserve(parts[p].size());
    for (std::size_t i : parts[p]) outs[p]->push_back(sentences[i]);
  }
  return split;
}

std::vector<Document> read_corpus_jsonl(std::istream &in) {
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error &e) {
      throw FormatError("corpus line " + std::to_string(line_no) +
                        ": invalid JSON");
    }
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("text") ||
        !obj["id"].is_string() || !obj["text"].is_string()) {
      throw FormatError("corpus line " + std::to_string(line_no) +
                        ": expected {\"id\": string, \"text\": string}");
    }
    docs.push_back(Document{obj["id"].get<std::string>(),
                            obj["text"].get<std::string>()});
  }
  return docs;
}

std::vector<Document> read_corpus_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus '" + path + "'");
  return read_corpus_jsonl(in);
}

void write_corpus_jsonl(std::ostream &out, const std::vector<Document> &docs) {
  for (const auto &d : docs) {
    nlohmann::json obj = {{"id", d.id}, {"text", d.text}};
    out << obj.dump() << '\n';
  }
}

std::vector<LabeledSentence> annotate_corpus(const std::vector<Document> &docs,
                                             const Gazetteer &gazetteer) {
  std::vector<LabeledSentence> out;
  for (const auto &doc : docs) {
    for (const Sentence &s : split_sentences(doc.text, doc.id)) {
      out.push_back(annotate(s, gazetteer));
    }
  }
  return out;
}

}  // namespace techterm
