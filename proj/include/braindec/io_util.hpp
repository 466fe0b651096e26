#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "braindec/error.hpp"

namespace braindec {

// --- tab-separated text helpers ---

/// Splits on '\t' keeping empty fields ("a\t" -> {"a", ""}).
std::vector<std::string_view> split_tabs(std::string_view line);

/// Strict decimal parse of the whole field; throws Error mentioning `what`.
double parse_double(std::string_view field, std::string_view what, std::size_t line_no);
std::int64_t parse_int(std::string_view field, std::string_view what, std::size_t line_no);

/// Reads one line, dropping a trailing '\r'. Returns false at EOF.
bool read_line(std::istream& in, std::string& line);

/// Fixed six-digit decimal used by the seconds and probability columns.
std::string format_fixed6(double value);

/// Shortest representation that round-trips through parse_double.
std::string format_exact(double value);

// --- little-endian binary helpers ---

template <typename T>
void write_le(std::ostream& out, T value) {
  static_assert(std::is_arithmetic_v<T>);
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  auto bits = std::bit_cast<U>(value);
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

/// Decodes a value from exactly sizeof(T) bytes.
template <typename T>
T decode_le(const unsigned char* bytes) {
  static_assert(std::is_arithmetic_v<T>);
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(bytes[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

/// Reads exactly sizeof(T) bytes or throws Error naming `what`.
template <typename T>
T read_le(std::istream& in, std::string_view what) {
  unsigned char bytes[sizeof(T)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(T))) {
    throw Error("unexpected end of file while reading " + std::string(what));
  }
  return decode_le<T>(bytes);
}

/// Writes `contents` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Whole-file read; throws Error if the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace braindec
