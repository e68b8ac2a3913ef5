#pragma once

// Stable content hashing (FNV-1a over IEEE bit patterns) used to key the
// determinant cache by potential and grid identity.

#include <bit>
#include <cstdint>
#include <string>

#include "diracres/common.hpp"

namespace diracres {

struct Fnv1a {
  std::uint64_t state = 14695981039346656037ull;

  void feed(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      state ^= (v >> (8 * i)) & 0xffull;
      state *= 1099511628211ull;
    }
  }
  void feed(double d) { feed(std::bit_cast<std::uint64_t>(d)); }
  void feed(int v) { feed(static_cast<std::uint64_t>(static_cast<std::int64_t>(v))); }
  void feed(const Complex& z) {
    feed(z.real());
    feed(z.imag());
  }

  std::string hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 0; i < 16; ++i)
      out[15 - i] = digits[(state >> (4 * i)) & 0xf];
    return out;
  }
};

}  // namespace diracres
