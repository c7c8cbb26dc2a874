#include "techterm/conll.h"

#include <fstream>

#include "techterm/error.h"

namespace techterm {

namespace {
constexpr std::string_view kDocStart = "-DOCSTART-";
}

void write_conll(std::ostream &out, const std::vector<LabeledSentence> &data) {
  bool first = true;
  std::string current_doc;
  for (const auto &ls : data) {
    if (first || ls.sentence.doc_id != current_doc) {
      out << kDocStart << ' ' << ls.sentence.doc_id << "\n\n";
      current_doc = ls.sentence.doc_id;
      first = false;
    }
    for (std::size_t i = 0; i < ls.sentence.tokens.size(); ++i) {
      out << ls.sentence.tokens[i].text << '\t'
          << label_char(ls.token_labels[i]) << '\n';
    }
    out << '\n';
  }
}

void write_conll_file(const std::string &path,
                      const std::vector<LabeledSentence> &data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_conll(out, data);
}

std::vector<LabeledSentence> read_conll(std::istream &in) {
  std::vector<LabeledSentence> data;
  std::string doc_id;
  std::size_t doc_sentence = 0;
  Sentence sentence;
  std::vector<TokenLabel> labels;
  std::size_t offset = 0;

  auto flush = [&]() {
    if (sentence.tokens.empty()) return;
    sentence.doc_id = doc_id;
    sentence.index = doc_sentence++;
    data.push_back(make_labeled(std::move(sentence), std::move(labels)));
    sentence = Sentence{};
    labels.clear();
    offset = 0;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line.compare(0, kDocStart.size(), kDocStart) == 0 &&
        (line.size() == kDocStart.size() || line[kDocStart.size()] == ' ')) {
      flush();
      doc_id = line.size() > kDocStart.size()
                   ? line.substr(kDocStart.size() + 1)
                   : std::string();
      doc_sentence = 0;
      continue;
    }
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 ||
        line.find('\t', tab + 1) != std::string::npos) {
      throw FormatError("TSV line " + std::to_string(line_no) +
                        ": expected token<TAB>label");
    }
    TokenLabel label;
    try {
      label = parse_token_label(std::string_view(line).substr(tab + 1));
    } catch (const FormatError &e) {
      throw FormatError("TSV line " + std::to_string(line_no) + ": " +
                        e.what());
    }
    if (!sentence.tokens.empty()) ++offset;
    Token tok{line.substr(0, tab), offset, offset + tab};
    offset += tab;
    sentence.tokens.push_back(std::move(tok));
    labels.push_back(label);
  }
  flush();
  return data;
}

std::vector<LabeledSentence> read_conll_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_conll(in);
}

}  // namespace techterm
