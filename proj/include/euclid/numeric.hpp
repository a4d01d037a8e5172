#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace euclid {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(const BigInt& num, const BigInt& den) {
  return Rational(num, den);
}

inline BigInt numerator_of(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt denominator_of(const Rational& q) { return boost::multiprecision::denominator(q); }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(const BigInt& z) { return z.convert_to<double>(); }

/// gcd of two nonnegative rationals: gcd(a/b, c/d) = gcd(ad, cb) / bd.
inline Rational rational_gcd(const Rational& x, const Rational& y) {
  if (x == 0) return y;
  if (y == 0) return x;
  const BigInt a = numerator_of(x), b = denominator_of(x);
  const BigInt c = numerator_of(y), d = denominator_of(y);
  return Rational(boost::multiprecision::gcd(a * d, c * b), b * d);
}

/// Parses "p", "p/q" or a decimal literal "12.375" exactly.
inline Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    return Rational(BigInt(text.substr(0, slash)), BigInt(text.substr(slash + 1)));
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(BigInt(text));
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  const auto frac_len = text.size() - dot - 1;
  if (digits.empty() || digits == "-" || digits == "+") digits += "0";
  BigInt den = 1;
  for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
  return Rational(BigInt(digits), den);
}

inline std::string to_string(const Rational& q) {
  if (denominator_of(q) == 1) return numerator_of(q).str();
  return numerator_of(q).str() + "/" + denominator_of(q).str();
}

}  // namespace euclid
