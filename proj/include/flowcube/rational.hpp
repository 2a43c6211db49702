#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace flowcube {

  using Rational = mpq_class;

  inline Rational make_rational(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
  }

  // floor(q) as a machine integer; offsets in this library are small.
  inline long floor_long(const Rational& q) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r.get_si();
  }

  inline std::string to_string(const Rational& q) { return q.get_str(); }

  // Accepts "3", "-1/16", "0.125".
  Rational parse_rational(std::string_view text);

  inline double to_double(const Rational& q) { return q.get_d(); }

}  // namespace flowcube
