#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>

#include "nlbox/errors.hpp"

namespace nlbox {

/// Exact rational scalar used for every probability in the library.
using Rational = mpq_class;

/// "p/q" in lowest terms; integers keep the "/1" suffix.
inline std::string to_string(const Rational& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

/// Accepts "p/q" or a bare integer "p", with an optional leading '-'.
inline Rational parse_rational(std::string_view text) {
  auto is_integer = [](std::string_view s) {
    if (!s.empty() && s.front() == '-') s.remove_prefix(1);
    if (s.empty()) return false;
    for (char c : s) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
  };
  const auto slash = text.find('/');
  const std::string_view num = text.substr(0, slash);
  const std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : text.substr(slash + 1);
  if (!is_integer(num) || !is_integer(den) || den.front() == '-') {
    throw ParseError("malformed rational \"" + std::string(text) + "\" (expected p/q)");
  }
  mpz_class p(std::string(num), 10);
  mpz_class q(std::string(den), 10);
  if (q == 0) throw ParseError("zero denominator in \"" + std::string(text) + "\"");
  Rational r(p, q);
  r.canonicalize();
  return r;
}

inline double to_double(const Rational& r) { return r.get_d(); }

/// 2^k as an exact rational (k may be negative).
inline Rational pow2(long k) {
  mpz_class z = 1;
  if (k >= 0) {
    mpz_mul_2exp(z.get_mpz_t(), z.get_mpz_t(), static_cast<mp_bitcnt_t>(k));
    return Rational(z);
  }
  mpz_mul_2exp(z.get_mpz_t(), z.get_mpz_t(), static_cast<mp_bitcnt_t>(-k));
  return Rational(mpz_class(1), z);
}

/// Combined size of numerator and denominator in bits.
inline std::size_t bit_size(const Rational& r) {
  return mpz_sizeinbase(r.get_num_mpz_t(), 2) + mpz_sizeinbase(r.get_den_mpz_t(), 2);
}

/// Largest multiple of 2^-bits that is <= r.
inline Rational round_down_dyadic(const Rational& r, unsigned long bits) {
  mpz_class scaled = r.get_num();
  mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), bits);
  mpz_fdiv_q(scaled.get_mpz_t(), scaled.get_mpz_t(), r.get_den_mpz_t());
  Rational out(scaled);
  mpq_div_2exp(out.get_mpq_t(), out.get_mpq_t(), bits);
  return out;
}

/// Smallest multiple of 2^-bits that is >= r.
inline Rational round_up_dyadic(const Rational& r, unsigned long bits) {
  mpz_class scaled = r.get_num();
  mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), bits);
  mpz_cdiv_q(scaled.get_mpz_t(), scaled.get_mpz_t(), r.get_den_mpz_t());
  Rational out(scaled);
  mpq_div_2exp(out.get_mpq_t(), out.get_mpq_t(), bits);
  return out;
}

}  // namespace nlbox
