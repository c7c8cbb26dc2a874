#ifndef TECHTERM_TEXT_H_
#define TECHTERM_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace techterm {

// ASCII case folding. Bytes >= 0x80 pass through untouched so UTF-8
// sequences stay valid.
std::string case_fold(std::string_view text);

bool is_ascii_space(unsigned char c);
bool is_ascii_punct(unsigned char c);
bool is_ascii_upper(unsigned char c);
bool is_ascii_lower(unsigned char c);
bool is_ascii_digit(unsigned char c);

// Splits UTF-8 text into code point substrings. Invalid lead bytes are
// returned as single-byte units.
std::vector<std::string_view> utf8_units(std::string_view text);

}  // namespace techterm

#endif  // TECHTERM_TEXT_H_
