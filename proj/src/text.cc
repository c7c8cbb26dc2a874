#include "techterm/text.h"

namespace techterm {

bool is_ascii_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_ascii_punct(unsigned char c) {
  return (c >= 0x21 && c <= 0x2f) || (c >= 0x3a && c <= 0x40) ||
         (c >= 0x5b && c <= 0x60) || (c >= 0x7b && c <= 0x7e);
}

bool is_ascii_upper(unsigned char c) { return c >= 'A' && c <= 'Z'; }
bool is_ascii_lower(unsigned char c) { return c >= 'a' && c <= 'z'; }
bool is_ascii_digit(unsigned char c) { return c >= '0' && c <= '9'; }

std::string case_fold(std::string_view text) {
  std::string out(text);
  for (char &c : out) {
    if (is_ascii_upper(static_cast<unsigned char>(c))) c = c - 'A' + 'a';
  }
  return out;
}

std::vector<std::string_view> utf8_units(std::string_view text) {
  std::vector<std::string_view> units;
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    if (lead >= 0xf0 && lead < 0xf8) {
      len = 4;
    } else if (lead >= 0xe0) {
      len = lead < 0xf0 ? 3 : 1;
    } else if (lead >= 0xc0) {
      len = 2;
    }
    if (i + len > text.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) & 0xc0) != 0x80) {
        len = 1;
        break;
      }
    }
    units.push_back(text.substr(i, len));
    i += len;
  }
  return units;
}

}  // namespace techterm
