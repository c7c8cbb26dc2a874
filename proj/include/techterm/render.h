#ifndef TECHTERM_RENDER_H_
#define TECHTERM_RENDER_H_

#include <string>
#include <string_view>
#include <vector>

#include "techterm/cascade.h"
#include "techterm/corpus.h"

namespace techterm {

enum class RenderFormat { kAnsi, kHtml };

// Highlights for one document. `sentences` and `extractions` are parallel.
// `gold`, when non-empty, is parallel to `sentences` and enables the
// "missed" mark on gold T tokens the system did not extract.
struct RenderInput {
  const Document *document = nullptr;
  const std::vector<Sentence> *sentences = nullptr;
  const std::vector<Extraction> *extractions = nullptr;
  const std::vector<std::vector<TokenLabel>> *gold = nullptr;
};

// Stage-I positive sentences are green, extracted terms yellow and missed
// terms red. Stripping the markup returns the document text unchanged.
std::string render(const RenderInput &input, RenderFormat format);

std::string strip_ansi(std::string_view text);
std::string strip_html(std::string_view text);

std::string html_escape(std::string_view text);

}  // namespace techterm

#endif  // TECHTERM_RENDER_H_
