#include "flowcube/rational.hpp"

#include <string>

#include "flowcube/errors.hpp"

namespace flowcube {

  Rational parse_rational(std::string_view text) {
    std::string s(text);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
      s.pop_back();
    }
    size_t start = s.find_first_not_of(" \t");
    if (start == std::string::npos) {
      throw InputError("empty rational");
    }
    s = s.substr(start);
    Rational q;
    auto dot = s.find('.');
    try {
      if (dot != std::string::npos) {
        if (s.find('/') != std::string::npos) {
          throw InputError("bad rational '" + s + "'");
        }
        bool        neg = !s.empty() && s[0] == '-';
        std::string digits = s.substr(neg ? 1 : 0);
        dot = digits.find('.');
        std::string whole = digits.substr(0, dot);
        std::string frac = digits.substr(dot + 1);
        if ((whole + frac).empty() || (whole + frac).find_first_not_of("0123456789") != std::string::npos) {
          throw InputError("bad rational '" + s + "'");
        }
        mpz_class num(whole.empty() ? "0" : whole);
        mpz_class den = 1;
        for (char c : frac) {
          num = num * 10 + (c - '0');
          den *= 10;
        }
        q = Rational(num, den);
        if (neg) {
          q = -q;
        }
      } else {
        if (q.set_str(s, 10) != 0) {
          throw InputError("bad rational '" + s + "'");
        }
        if (q.get_den() == 0) {
          throw InputError("zero denominator in '" + s + "'");
        }
      }
    } catch (std::invalid_argument const&) {
      throw InputError("bad rational '" + s + "'");
    }
    q.canonicalize();
    return q;
  }

}  // namespace flowcube
