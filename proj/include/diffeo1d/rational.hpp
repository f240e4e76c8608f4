#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace diffeo1d {

using rat = mpq_class;

// Parses "p/q" or a plain integer / decimal string ("0.25" -> 1/4).
inline rat parse_rat(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("parse_rat: empty string");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    rat q(s);
    q.canonicalize();
    if (q.get_den() == 0) throw std::invalid_argument("parse_rat: zero denominator in '" + s + "'");
    return q;
  }
  auto dot = s.find('.');
  if (dot == std::string::npos) {
    rat q(s);
    q.canonicalize();
    return q;
  }
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  if (digits.empty() || digits == "-" || digits == "+")
    throw std::invalid_argument("parse_rat: malformed '" + s + "'");
  mpz_class num(digits);
  mpz_class den(1);
  for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
  rat q(num, den);
  q.canonicalize();
  return q;
}

inline std::string rat_to_string(const rat& q) { return q.get_str(); }

inline double to_double(const rat& q) { return q.get_d(); }

}  // namespace diffeo1d
