#ifndef TECHTERM_CONLL_H_
#define TECHTERM_CONLL_H_

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "techterm/corpus.h"

namespace techterm {

// CoNLL-style TSV: "token<TAB>label" per line, a blank line after every
// sentence and a "-DOCSTART- <id>" line whenever the document changes.
void write_conll(std::ostream &out, const std::vector<LabeledSentence> &data);
void write_conll_file(const std::string &path,
                      const std::vector<LabeledSentence> &data);

// Token offsets are rebuilt as if tokens were joined by single spaces.
// Sentence indices count sentences within each document block. Throws
// FormatError with the offending line number.
std::vector<LabeledSentence> read_conll(std::istream &in);
std::vector<LabeledSentence> read_conll_file(const std::string &path);

}  // namespace techterm

#endif  // TECHTERM_CONLL_H_
