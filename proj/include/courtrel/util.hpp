#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace courtrel {

// Error raised by any of the file-format parsers. line/column are 1-based;
// 0 means "not applicable".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line = 0, int column = 0)
      : std::runtime_error(format(msg, line, column)), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(const std::string& msg, int line, int column);
  int line_;
  int column_;
};

std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t v);

// Unbiased draw in [0, n); rejection sampling so the result depends only on
// the mt19937_64 stream, not on library internals.
std::uint64_t bounded_u64(std::mt19937_64& rng, std::uint64_t n);

template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(bounded_u64(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

std::string trim(const std::string& s);
std::string to_lower(const std::string& s);
bool starts_with(const std::string& s, const std::string& prefix);
std::vector<std::string> split(const std::string& s, char delim);  // keeps empty fields
std::vector<std::string> split_ws(const std::string& s);           // collapses runs of whitespace

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Lossless double <-> text (hexfloat form).
std::string double_to_hex(double v);
double double_from_hex(const std::string& s);

}  // namespace courtrel
