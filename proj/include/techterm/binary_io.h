#ifndef TECHTERM_BINARY_IO_H_
#define TECHTERM_BINARY_IO_H_

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "techterm/error.h"

namespace techterm::binio {

// Little-endian fixed-width encoding for model files.

inline void write_u32(std::ostream &out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char *>(b), 4);
}

inline void write_u64(std::ostream &out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char *>(b), 8);
}

inline void write_f64(std::ostream &out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  write_u64(out, bits);
}

inline void write_string(std::ostream &out, std::string_view s) {
  write_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void write_f64s(std::ostream &out, const std::vector<double> &values) {
  for (double v : values) write_f64(out, v);
}

inline void write_magic(std::ostream &out, std::string_view magic) {
  out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
}

inline void read_exact(std::istream &in, char *dst, std::size_t n) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw FormatError("model file truncated");
  }
}

inline std::uint32_t read_u32(std::istream &in) {
  unsigned char b[4];
  read_exact(in, reinterpret_cast<char *>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

inline std::uint64_t read_u64(std::istream &in) {
  unsigned char b[8];
  read_exact(in, reinterpret_cast<char *>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

inline double read_f64(std::istream &in) {
  std::uint64_t bits = read_u64(in);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

inline std::string read_string(std::istream &in, std::uint32_t max_len = 1u << 20) {
  std::uint32_t len = read_u32(in);
  if (len > max_len) throw FormatError("model file string too long");
  std::string s(len, '\0');
  read_exact(in, s.data(), len);
  return s;
}

inline std::vector<double> read_f64s(std::istream &in, std::size_t n) {
  std::vector<double> values(n);
  for (auto &v : values) v = read_f64(in);
  return values;
}

inline void expect_magic(std::istream &in, std::string_view magic) {
  std::string got(magic.size(), '\0');
  in.read(got.data(), static_cast<std::streamsize>(magic.size()));
  if (static_cast<std::size_t>(in.gcount()) != magic.size() || got != magic) {
    throw FormatError("bad model file magic, expected " + std::string(magic));
  }
}

inline void expect_version(std::istream &in, std::uint32_t version) {
  std::uint32_t got = read_u32(in);
  if (got != version) {
    throw FormatError("unsupported model file version " + std::to_string(got));
  }
}

}  // namespace techterm::binio

#endif  // TECHTERM_BINARY_IO_H_
