#include "techterm/features.h"

#include <algorithm>
#include <set>

#include "techterm/error.h"
#include "techterm/text.h"

namespace techterm {

const char *tag_name(CoarsePosTag tag) {
  switch (tag) {
    case CoarsePosTag::CAP:
      return "CAP";
    case CoarsePosTag::LOWER:
      return "LOWER";
    case CoarsePosTag::MIXED:
      return "MIXED";
    case CoarsePosTag::NUM:
      return "NUM";
    case CoarsePosTag::PUNCT:
      return "PUNCT";
    case CoarsePosTag::SYM:
      return "SYM";
  }
  return "SYM";
}

std::string word_shape(std::string_view token) {
  std::string shape;
  for (std::string_view unit : utf8_units(token)) {
    char cls = 's';
    if (unit.size() == 1) {
      auto c = static_cast<unsigned char>(unit[0]);
      if (is_ascii_upper(c)) cls = 'X';
      else if (is_ascii_lower(c)) cls = 'x';
      else if (is_ascii_digit(c)) cls = 'd';
    }
    if (shape.empty() || shape.back() != cls) shape.push_back(cls);
  }
  return shape;
}

std::vector<std::string> char_ngrams(std::string_view token, std::size_t n_min,
                                     std::size_t n_max) {
  std::string marked = "<" + case_fold(token) + ">";
  std::vector<std::string_view> units = utf8_units(marked);
  std::set<std::string> grams;
  for (std::size_t n = std::max<std::size_t>(n_min, 1); n <= n_max; ++n) {
    if (n > units.size()) break;
    for (std::size_t i = 0; i + n <= units.size(); ++i) {
      std::string g;
      for (std::size_t k = i; k < i + n; ++k) g.append(units[k]);
      grams.insert(std::move(g));
    }
  }
  return {grams.begin(), grams.end()};
}

CoarsePosTag classify_token(std::string_view token) {
  auto all = [&](auto pred) {
    return std::all_of(token.begin(), token.end(),
                       [&](char ch) { return pred(static_cast<unsigned char>(ch)); });
  };
  auto any = [&](auto pred) {
    return std::any_of(token.begin(), token.end(),
                       [&](char ch) { return pred(static_cast<unsigned char>(ch)); });
  };
  if (token.empty()) return CoarsePosTag::SYM;
  if (any(is_ascii_digit) &&
      all([](unsigned char c) { return is_ascii_digit(c) || c == ',' || c == '.'; })) {
    return CoarsePosTag::NUM;
  }
  if (all(is_ascii_punct)) return CoarsePosTag::PUNCT;
  if (is_ascii_upper(static_cast<unsigned char>(token[0])) &&
      std::all_of(token.begin() + 1, token.end(), [](char ch) {
        return is_ascii_lower(static_cast<unsigned char>(ch));
      })) {
    return CoarsePosTag::CAP;
  }
  if (all(is_ascii_lower)) return CoarsePosTag::LOWER;
  auto is_letter = [](unsigned char c) { return is_ascii_upper(c) || is_ascii_lower(c); };
  if (any(is_letter) &&
      all([&](unsigned char c) { return is_letter(c) || is_ascii_digit(c); })) {
    return CoarsePosTag::MIXED;
  }
  return CoarsePosTag::SYM;
}

std::vector<CoarsePosTag> OrthographicTagger::tag(const Sentence &sentence) const {
  std::vector<CoarsePosTag> tags;
  tags.reserve(sentence.tokens.size());
  for (const auto &t : sentence.tokens) tags.push_back(classify_token(t.text));
  return tags;
}

std::vector<CoarsePosTag> pos_tag(const Sentence &sentence) {
  return OrthographicTagger{}.tag(sentence);
}

bool SparseFeatures::contains(std::string_view feature) const {
  return std::binary_search(fired.begin(), fired.end(), feature);
}

SparseFeatures extract_features(const Sentence &sentence,
                                const std::vector<CoarsePosTag> &tags,
                                std::size_t i, const FeatureConfig &config) {
  const std::size_t n = sentence.tokens.size();
  if (i >= n) {
    throw PositionOutOfRange("position " + std::to_string(i) +
                             " outside sentence of length " + std::to_string(n));
  }
  if (tags.size() != n) throw LengthMismatch("tag count differs from token count");

  auto word = [&](std::size_t k) { return case_fold(sentence.tokens[k].text); };
  auto tag_at = [&](std::ptrdiff_t k) -> std::string {
    if (k < 0) return "<BOS>";
    if (static_cast<std::size_t>(k) >= n) return "<EOS>";
    return tag_name(tags[k]);
  };
  auto shape_at = [&](std::ptrdiff_t k) -> std::string {
    if (k < 0) return "<BOS>";
    if (static_cast<std::size_t>(k) >= n) return "<EOS>";
    return word_shape(sentence.tokens[k].text);
  };
  const auto pos = static_cast<std::ptrdiff_t>(i);

  std::set<std::string> fired;
  fired.insert("W0=" + word(i));
  fired.insert("W-1=" + (i > 0 ? word(i - 1) : std::string("<BOS>")));
  fired.insert("W+1=" + (i + 1 < n ? word(i + 1) : std::string("<EOS>")));
  for (auto &g : char_ngrams(sentence.tokens[i].text, config.ngram_min,
                             config.ngram_max)) {
    fired.insert("NG=" + g);
  }
  fired.insert("P0=" + tag_at(pos));
  fired.insert("PSEQ=" + tag_at(pos - 1) + "_" + tag_at(pos) + "_" + tag_at(pos + 1));
  fired.insert("SH0=" + shape_at(pos));
  fired.insert("SHSEQ=" + shape_at(pos - 1) + "_" + shape_at(pos) + "_" +
               shape_at(pos + 1));
  std::size_t lo = i >= config.window ? i - config.window : 0;
  for (std::size_t k = lo; k < i; ++k) fired.insert("LW=" + word(k));
  std::size_t hi = std::min(n, i + config.window + 1);
  for (std::size_t k = i + 1; k < hi; ++k) fired.insert("RW=" + word(k));

  return SparseFeatures{{fired.begin(), fired.end()}};
}

std::vector<SparseFeatures> sentence_features(const Sentence &sentence,
                                              const PosTagger &tagger,
                                              const FeatureConfig &config) {
  std::vector<CoarsePosTag> tags = tagger.tag(sentence);
  std::vector<SparseFeatures> out;
  out.reserve(sentence.tokens.size());
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    out.push_back(extract_features(sentence, tags, i, config));
  }
  return out;
}

std::optional<std::int32_t> FeatureIndex::add(std::string_view feature) {
  if (auto id = lookup(feature)) return id;
  if (frozen_) return std::nullopt;
  auto id = static_cast<std::int32_t>(names_.size());
  names_.emplace_back(feature);
  ids_.emplace(names_.back(), id);
  return id;
}

std::optional<std::int32_t> FeatureIndex::lookup(std::string_view feature) const {
  auto it = ids_.find(std::string(feature));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

FeatureIndex FeatureIndex::build(const std::vector<std::vector<SparseFeatures>> &data,
                                 std::size_t min_count) {
  std::unordered_map<std::string, std::size_t> counts;
  std::vector<std::string> order;
  for (const auto &seq : data) {
    for (const auto &pos : seq) {
      for (const auto &f : pos.fired) {
        auto [it, inserted] = counts.emplace(f, 0);
        if (inserted) order.push_back(f);
        ++it->second;
      }
    }
  }
  FeatureIndex index;
  for (const auto &f : order) {
    if (counts[f] >= min_count) index.add(f);
  }
  index.freeze();
  return index;
}

FeatureIndex FeatureIndex::from_names(std::vector<std::string> names) {
  FeatureIndex index;
  for (auto &n : names) {
    if (index.lookup(n)) throw FormatError("duplicate feature '" + n + "'");
    index.add(n);
  }
  index.freeze();
  return index;
}

std::vector<std::int32_t> FeatureIndex::encode(const SparseFeatures &features) const {
  std::vector<std::int32_t> ids;
  ids.reserve(features.fired.size());
  for (const auto &f : features.fired) {
    if (auto id = lookup(f)) ids.push_back(*id);
  }
  return ids;
}

}  // namespace techterm
