#ifndef TECHTERM_CORPUS_H_
#define TECHTERM_CORPUS_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace techterm {

// A token is a byte range [start, end) of its source text.
struct Token {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const Token &) const = default;
};

struct Sentence {
  std::string doc_id;
  std::size_t index = 0;
  std::vector<Token> tokens;

  std::size_t size() const { return tokens.size(); }
};

struct Document {
  std::string id;
  std::string text;
};

enum class TokenLabel : std::uint8_t { T = 0, O = 1 };

// Class index 0 is NoTech so that argmax ties resolve to NoTech.
enum class SentenceLabel : std::uint8_t { NoTech = 0, ContainsTech = 1 };

inline constexpr int kNumSentenceClasses = 2;

char label_char(TokenLabel label);
TokenLabel parse_token_label(std::string_view text);
const char *label_name(SentenceLabel label);

struct LabeledSentence {
  Sentence sentence;
  std::vector<TokenLabel> token_labels;
  SentenceLabel sentence_label = SentenceLabel::NoTech;
};

// Builds a LabeledSentence with the sentence label derived from the token
// labels. Throws LengthMismatch when the label count differs.
LabeledSentence make_labeled(Sentence sentence, std::vector<TokenLabel> labels);

SentenceLabel derive_sentence_label(const std::vector<TokenLabel> &labels);

// Whitespace split, then leading and trailing punctuation characters become
// single-character tokens. Internal punctuation stays attached.
std::vector<Token> tokenize(std::string_view text);

// Rule-based sentence splitter. Offsets in the returned tokens refer to
// `text`.
std::vector<Sentence> split_sentences(std::string_view text,
                                      std::string_view doc_id = {});

// Immutable after construction; safe to share across threads.
class Gazetteer {
 public:
  using Entry = std::vector<std::string>;

  // Throws EmptyGazetteer when no entry survives.
  static Gazetteer load(std::istream &in);
  static Gazetteer load_file(const std::string &path);
  static Gazetteer from_terms(const std::vector<std::string> &terms);

  std::size_t size() const { return entries_.size(); }
  std::size_t max_length() const { return max_length_; }
  bool contains(const Entry &folded) const { return entries_.count(folded); }
  const std::set<Entry> &entries() const { return entries_; }
  // First-seen surface form per entry, in load order.
  const std::vector<std::string> &surface_forms() const { return surfaces_; }

 private:
  std::set<Entry> entries_;
  std::vector<std::string> surfaces_;
  std::size_t max_length_ = 0;
};

// Longest-match, left-to-right, non-overlapping string matching over
// case-folded tokens.
LabeledSentence annotate(const Sentence &sentence, const Gazetteer &gazetteer);

struct ClassCounts {
  std::size_t positive = 0;
  std::size_t negative = 0;
};

ClassCounts count_classes(const std::vector<LabeledSentence> &sentences);

// Random downsampling of the majority class to the minority count. Throws
// DegenerateDataset when a class is empty.
std::vector<LabeledSentence> balance(const std::vector<LabeledSentence> &sentences,
                                     std::uint64_t seed);

struct SplitRatios {
  double train = 0.7;
  double validation = 0.15;
  double test = 0.15;
};

struct DatasetSplit {
  std::vector<LabeledSentence> train;
  std::vector<LabeledSentence> validation;
  std::vector<LabeledSentence> test;
  std::uint64_t seed = 0;
};

void validate_ratios(const SplitRatios &ratios);

// Stratified by sentence label. Throws RatioError for invalid ratios.
DatasetSplit split_dataset(const std::vector<LabeledSentence> &sentences,
                           const SplitRatios &ratios, std::uint64_t seed);

// JSON-lines corpus: one {"id", "text"} object per line.
std::vector<Document> read_corpus_jsonl(std::istream &in);
std::vector<Document> read_corpus_file(const std::string &path);
void write_corpus_jsonl(std::ostream &out, const std::vector<Document> &docs);

// Splits and annotates every document of a corpus.
std::vector<LabeledSentence> annotate_corpus(const std::vector<Document> &docs,
                                             const Gazetteer &gazetteer);

}  // namespace techterm

#endif  // TECHTERM_CORPUS_H_
