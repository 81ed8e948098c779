#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace bushy {

/// Arbitrary-precision natural number. Growth functions and tree values live here.
using Natural = boost::multiprecision::cpp_int;
/// Exact rational used for every probability bound.
using Rational = boost::multiprecision::cpp_rational;

inline Natural pow2(std::uint64_t exponent) {
  Natural out = 1;
  out <<= static_cast<unsigned>(exponent);
  return out;
}

/// Number of bits needed to write n in binary (0 for n == 0).
inline std::uint64_t bit_length(const Natural& n) {
  if (n <= 0) return 0;
  return boost::multiprecision::msb(n) + 1;
}

/// Low 64 bits of n; this is what the toy machine sees when it reads a value.
inline std::uint64_t low64(const Natural& n) {
  return static_cast<std::uint64_t>(n & Natural(std::numeric_limits<std::uint64_t>::max()));
}

inline std::string to_string(const Natural& n) { return n.str(); }

inline std::string to_string(const Rational& q) {
  return numerator(q).str() + "/" + denominator(q).str();
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline Natural parse_natural(const std::string& text) { return Natural(text); }

}  // namespace bushy
