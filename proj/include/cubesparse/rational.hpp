#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <vector>

namespace cubesparse {

/// Arbitrary-precision rationals for the steps that must preserve A*x
/// bit-exactly (kernel walks, fractional rounding). Doubles convert in
/// losslessly; denominators compound across walk steps, hence big ints.
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Exact conversion: every finite double is a dyadic rational.
inline Rat rat_from_double(double v) { return Rat(v); }

inline double rat_to_double(const Rat& v) { return static_cast<double>(v); }

inline bool rat_is_integer(const Rat& v) { return denominator(v) == 1; }

inline BigInt rat_floor(const Rat& v) {
  BigInt q = numerator(v) / denominator(v);
  if (numerator(v) < 0 && q * denominator(v) != numerator(v)) --q;
  return q;
}

inline std::vector<Rat> rats_from_doubles(const std::vector<double>& x) {
  std::vector<Rat> out;
  out.reserve(x.size());
  for (double v : x) out.emplace_back(v);
  return out;
}

inline std::vector<double> rats_to_doubles(const std::vector<Rat>& x) {
  std::vector<double> out;
  out.reserve(x.size());
  for (const Rat& v : x) out.push_back(static_cast<double>(v));
  return out;
}

}  // namespace cubesparse
