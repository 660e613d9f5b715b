#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdlib>
#include <string>

#include "jetsym/errors.hpp"

namespace jetsym {

// Exact arbitrary-precision arithmetic; no floating point ever enters a
// symbolic verdict.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer int_gcd(const Integer& a, const Integer& b) {
  return boost::multiprecision::gcd(a, b);
}

inline Integer int_lcm(const Integer& a, const Integer& b) {
  return boost::multiprecision::lcm(a, b);
}

/// gcd on Q: gcd(a/b, c/d) = gcd(a,c)/lcm(b,d). Returns a nonnegative value;
/// gcd(0,0) = 0.
inline Rational rational_gcd(const Rational& a, const Rational& b) {
  if (a == 0) return b < 0 ? Rational(-b) : b;
  if (b == 0) return a < 0 ? Rational(-a) : a;
  return Rational(int_gcd(numerator(a), numerator(b)),
                  int_lcm(denominator(a), denominator(b)));
}

inline int sign(const Rational& r) { return r < 0 ? -1 : (r > 0 ? 1 : 0); }

inline double to_double(const Rational& r) { return r.template convert_to<double>(); }

/// Prints as "p" or "p/q" with q > 1.
inline std::string to_string(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

/// Accepts integers ("42", "-7"), fractions ("1/2", "-3/4") and plain
/// decimals ("0.25"), all converted exactly.
inline Rational parse_rational(const std::string& text) {
  std::string s = text;
  if (s.empty()) throw ParseError("empty number", 0);
  auto slash = s.find('/');
  try {
    if (slash != std::string::npos) {
      Integer num(s.substr(0, slash));
      Integer den(s.substr(slash + 1));
      if (den == 0) throw ParseError("zero denominator in rational literal", slash + 1);
      return Rational(num, den);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(Integer(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t frac_len = s.size() - dot - 1;
    Integer den = 1;
    for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
    return Rational(Integer(digits), den);
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const ParseError*>(&e)) throw;
    throw ParseError("malformed number '" + text + "'", 0);
  }
}

}  // namespace jetsym
