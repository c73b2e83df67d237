#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <string>
#include <vector>

#include "pcs/errors.hpp"

namespace pcs {

// Arbitrary-precision rational kept in lowest terms with positive
// denominator; the whole solver stack runs on these, never on doubles.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer numerator_of(const Rational& r) {
  return boost::multiprecision::numerator(r);
}

inline Integer denominator_of(const Rational& r) {
  return boost::multiprecision::denominator(r);
}

// Renders "p/q", or just "p" when the value is an integer.
inline std::string format_rational(const Rational& r) {
  std::string out = numerator_of(r).str();
  if (denominator_of(r) != 1) {
    out += "/" + denominator_of(r).str();
  }
  return out;
}

// Accepts an optional leading '-', digits, and an optional "/digits" suffix
// with a positive denominator.  Anything else is rejected.
inline Rational parse_rational(const std::string& text) {
  const auto bad = [&text]() -> input_error {
    return input_error("not a rational literal: '" + text + "'");
  };
  std::size_t pos = 0;
  if (pos < text.size() && text[pos] == '-') ++pos;
  std::size_t digits_start = pos;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos == digits_start) throw bad();
  Integer num(text.substr(0, pos));
  Integer den = 1;
  if (pos < text.size()) {
    if (text[pos] != '/') throw bad();
    ++pos;
    std::size_t den_start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == den_start || pos != text.size()) throw bad();
    den = Integer(text.substr(den_start));
    if (den == 0) throw input_error("zero denominator in '" + text + "'");
  }
  return Rational(num, den);
}

inline double to_double(const Rational& r) {
  return static_cast<double>(r);
}

// Fixed-point decimal rendering with round-half-away-from-zero, used only
// for presentation; exact values always travel alongside.
inline std::string format_decimal(const Rational& r, unsigned decimals) {
  Integer scale = 1;
  for (unsigned i = 0; i < decimals; ++i) scale *= 10;
  Integer num = numerator_of(r) * scale * 2;
  Integer den = denominator_of(r);
  Integer q = num / den;
  // q is twice the scaled value truncated toward zero; finish the rounding.
  bool negative = q < 0;
  Integer mag = negative ? Integer(-q) : q;
  mag = (mag + 1) / 2;
  Integer whole = mag / scale;
  Integer frac = mag % scale;
  std::string out = (negative && mag != 0) ? "-" : "";
  out += whole.str();
  if (decimals > 0) {
    std::string f = frac.str();
    out += "." + std::string(decimals - f.size(), '0') + f;
  }
  return out;
}

inline Rational vector_sum(const std::vector<Rational>& v) {
  Rational s = 0;
  for (const auto& x : v) s += x;
  return s;
}

inline Rational dot(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  if (a.size() != b.size()) throw input_error("dot product length mismatch");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace pcs
