#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace resp {

// Group elements are canonical integer tuples; the identity is always the
// all-zeros tuple and every coordinate is a least non-negative residue.
// Lexicographic order on tuples is the canonical order used everywhere
// (sorted element lists, subgroup comparison, deterministic scans).
using Coord = std::int32_t;
using Element = std::vector<Coord>;

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// An internal cross-check (two independent algorithms for the same value)
// disagreed.  This is never a user error; callers map it to exit code 3.
class InternalCheckError : public std::runtime_error {
public:
  explicit InternalCheckError(const std::string& what)
      : std::runtime_error(what) {}
};

inline std::string format_element(const Element& e) {
  std::string s = "(";
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(e[i]);
  }
  s += ")";
  return s;
}

struct ElementHash {
  std::size_t operator()(const Element& e) const {
    // FNV-1a over the coordinate bytes.
    std::uint64_t h = 1469598103934665603ull;
    for (Coord c : e) {
      std::uint64_t v = static_cast<std::uint64_t>(static_cast<std::uint32_t>(c));
      for (int b = 0; b < 4; ++b) {
        h ^= (v >> (8 * b)) & 0xff;
        h *= 1099511628211ull;
      }
    }
    return static_cast<std::size_t>(h);
  }
};

inline bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// True iff n is p^k for some k >= 0 (so n == 1 counts).
inline bool is_power_of(std::uint64_t n, std::uint64_t p) {
  if (n == 0 || p < 2) return false;
  while (n % p == 0) n /= p;
  return n == 1;
}

}  // namespace resp
