#include "techterm/render.h"

#include "techterm/error.h"

namespace techterm {

namespace {

enum class Mark { kNone, kExtracted, kMissed };

struct Style {
  std::string sentence_open, sentence_close;
  std::string extracted_open, missed_open;
  std::string mark_close_in_sentence, mark_close_outside;
};

const Style &style_for(RenderFormat format) {
  static const Style ansi{"\x1b[42m", "\x1b[0m", "\x1b[43m", "\x1b[41m",
                          "\x1b[42m", "\x1b[0m"};
  static const Style html{"<span class=\"tech-sentence\">", "</span>",
                          "<mark class=\"tech-term\">", "<mark class=\"missed-term\">",
                          "</mark>", "</mark>"};
  return format == RenderFormat::kAnsi ? ansi : html;
}

}  // namespace

std::string html_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render(const RenderInput &input, RenderFormat format) {
  const std::string &text = input.document->text;
  const auto &sentences = *input.sentences;
  const auto &extractions = *input.extractions;
  if (sentences.size() != extractions.size() ||
      (input.gold && input.gold->size() != sentences.size())) {
    throw LengthMismatch("render inputs are not aligned");
  }
  const Style &style = style_for(format);
  std::string out;
  std::size_t pos = 0;
  auto copy_to = [&](std::size_t end) {
    std::string_view chunk = std::string_view(text).substr(pos, end - pos);
    out += format == RenderFormat::kHtml ? html_escape(chunk) : std::string(chunk);
    pos = end;
  };

  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const Sentence &sentence = sentences[s];
    if (sentence.tokens.empty()) continue;
    const Extraction &ex = extractions[s];
    const std::vector<TokenLabel> *gold =
        input.gold ? &(*input.gold)[s] : nullptr;
    if (gold && gold->size() != sentence.tokens.size()) {
      throw LengthMismatch("gold labels do not cover sentence " + std::to_string(s));
    }
    const std::size_t n = sentence.tokens.size();
    std::vector<Mark> marks(n, Mark::kNone);
    for (std::size_t i = 0; i < n; ++i) {
      bool extracted = ex.sentence_positive && i < ex.token_labels.size() &&
                       ex.token_labels[i] == TokenLabel::T;
      if (extracted) marks[i] = Mark::kExtracted;
      else if (gold && (*gold)[i] == TokenLabel::T) marks[i] = Mark::kMissed;
    }

    copy_to(sentence.tokens.front().start);
    if (ex.sentence_positive) out += style.sentence_open;
    std::size_t i = 0;
    while (i < n) {
      if (marks[i] == Mark::kNone) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j + 1 < n && marks[j + 1] == marks[i]) ++j;
      copy_to(sentence.tokens[i].start);
      out += marks[i] == Mark::kExtracted ? style.extracted_open : style.missed_open;
      copy_to(sentence.tokens[j].end);
      out += ex.sentence_positive ? style.mark_close_in_sentence
                                  : style.mark_close_outside;
      i = j + 1;
    }
    copy_to(sentence.tokens.back().end);
    if (ex.sentence_positive) out += style.sentence_close;
  }
  copy_to(text.size());

  if (format == RenderFormat::kHtml) {
    return "<div class=\"document\" data-id=\"" + html_escape(input.document->id) +
           "\">" + out + "</div>";
  }
  return out;
}

std::string strip_ansi(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\x1b' && i + 1 < text.size() && text[i + 1] == '[') {
      std::size_t j = i + 2;
      while (j < text.size() && text[j] != 'm') ++j;
      i = j;
      continue;
    }
    out += text[i];
  }
  return out;
}

std::string strip_html(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '<') {
      std::size_t close = text.find('>', i);
      if (close == std::string_view::npos) break;
      i = close;
      continue;
    }
    if (c == '&') {
      static constexpr std::pair<std::string_view, char> kEntities[] = {
          {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}};
      bool matched = false;
      for (const auto &[entity, ch] : kEntities) {
        if (text.substr(i, entity.size()) == entity) {
          out += ch;
          i += entity.size() - 1;
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    out += c;
  }
  return out;
}

}  // namespace techterm
