#include "techterm/synth.h"

#include <cstdio>
#include <set>
#include <string>

#include "techterm/error.h"
#include "techterm/rng.h"
#include "techterm/text.h"

namespace techterm {

namespace {

const std::vector<std::string> kSubjects = {
    "Engineers",      "The team",        "Researchers",   "Developers",
    "Our company",    "The startup",     "Analysts",      "The lab",
    "Students",       "The vendor",      "Google",        "Facebook",
    "Microsoft",      "Amazon",          "The bank",      "Several hospitals",
    "The government", "A consultancy",   "The newsroom",  "Retailers"};

const std::vector<std::string> kTechVerbs = {
    "adopted",           "released",        "deployed",
    "integrated",        "benchmarked",     "migrated to",
    "built a prototype with", "rely on",     "evaluated",
    "switched to",       "are experimenting with", "open-sourced",
    "announced support for", "trained models with", "replaced legacy code with"};

const std::vector<std::string> kAdverbials = {
    "last week",      "yesterday",        "in production",  "this quarter",
    "at scale",       "for the first time", "again",        "recently",
    "without delay",  "across the board", "on Monday",      "in Dublin"};

const std::vector<std::string> kNeutralPredicates = {
    "hired new staff",           "opened an office",
    "reported strong revenue",   "announced a partnership",
    "held a press conference",   "moved to a new building",
    "published annual results",  "cut costs",
    "raised more funding",       "visited customers",
    "changed its leadership",    "posted a job advert",
    "won an industry award",     "delayed the launch",
    "signed a lease",            "expanded the sales team"};

bool shares_token(const std::string &phrase, const std::set<std::string> &vocab) {
  for (const Token &t : tokenize(phrase)) {
    if (vocab.count(case_fold(t.text))) return true;
  }
  return false;
}

std::vector<std::string> usable(const std::vector<std::string> &phrases,
                                const std::set<std::string> &vocab,
                                const char *what) {
  std::vector<std::string> out;
  for (const auto &p : phrases) {
    if (!shares_token(p, vocab)) out.push_back(p);
  }
  if (out.empty()) {
    throw ConfigError(std::string("every synthetic ") + what +
                      " collides with the gazetteer");
  }
  return out;
}

const std::string &pick(const std::vector<std::string> &items, Rng &rng) {
  return items[rng.uniform_index(items.size())];
}

struct Piece {
  std::string text;
  bool term = false;
};

}  // namespace

SynthCorpus synthesize(const Gazetteer &gazetteer, const SynthConfig &config) {
  if (config.sentences == 0) throw ConfigError("synth needs at least one sentence");
  if (config.sentences_per_document == 0) {
    throw ConfigError("sentences_per_document must be positive");
  }
  if (!(config.positive_fraction >= 0.0 && config.positive_fraction <= 1.0)) {
    throw ConfigError("positive_fraction must lie in [0, 1]");
  }

  std::set<std::string> gazetteer_tokens;
  for (const auto &entry : gazetteer.entries()) {
    gazetteer_tokens.insert(entry.begin(), entry.end());
  }
  const auto subjects = usable(kSubjects, gazetteer_tokens, "subject");
  const auto verbs = usable(kTechVerbs, gazetteer_tokens, "verb");
  const auto adverbials = usable(kAdverbials, gazetteer_tokens, "adverbial");
  const auto predicates = usable(kNeutralPredicates, gazetteer_tokens, "predicate");

  // A term is usable when it cannot end a sentence on its own inside a
  // template.
  std::vector<std::string> terms;
  for (const auto &surface : gazetteer.surface_forms()) {
    if (split_sentences("Developers use " + surface + " and more.").size() == 1) {
      terms.push_back(surface);
    }
  }
  if (terms.empty()) throw ConfigError("no gazetteer term fits the templates");

  Rng rng(config.seed);
  SynthCorpus out;
  Document doc;
  std::size_t in_doc = 0;

  for (std::size_t s = 0; s < config.sentences; ++s) {
    if (in_doc == 0) {
      char id[32];
      std::snprintf(id, sizeof id, "synth-%05zu", out.documents.size());
      doc = Document{id, {}};
    }
    std::vector<Piece> pieces;
    const bool positive = rng.uniform_real() < config.positive_fraction;
    if (positive) {
      pieces.push_back({pick(subjects, rng)});
      pieces.push_back({pick(verbs, rng)});
      pieces.push_back({pick(terms, rng), true});
      if (rng.uniform_index(4) == 0) {
        pieces.push_back({"and"});
        pieces.push_back({pick(terms, rng), true});
      }
      pieces.push_back({pick(adverbials, rng)});
    } else {
      pieces.push_back({pick(subjects, rng)});
      pieces.push_back({pick(predicates, rng)});
      pieces.push_back({pick(adverbials, rng)});
    }
    pieces.push_back({"."});

    Sentence sentence;
    sentence.doc_id = doc.id;
    sentence.index = in_doc;
    std::vector<TokenLabel> labels;
    if (!doc.text.empty()) doc.text += ' ';
    for (std::size_t p = 0; p < pieces.size(); ++p) {
      // The final period attaches to the preceding word.
      if (p > 0 && pieces[p].text != ".") doc.text += ' ';
      const std::size_t base = doc.text.size();
      for (Token t : tokenize(pieces[p].text)) {
        t.start += base;
        t.end += base;
        sentence.tokens.push_back(std::move(t));
        labels.push_back(pieces[p].term ? TokenLabel::T : TokenLabel::O);
      }
      doc.text += pieces[p].text;
    }
    out.gold.push_back(make_labeled(std::move(sentence), std::move(labels)));

    if (++in_doc == config.sentences_per_document || s + 1 == config.sentences) {
      out.documents.push_back(std::move(doc));
      in_doc = 0;
    }
  }
  return out;
}

}  // namespace techterm
