#include "flowcube/freeprod.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "flowcube/errors.hpp"

namespace flowcube {

  ////////////////////////////////////////////////////////////////////////
  // FactorSystem
  ////////////////////////////////////////////////////////////////////////

  FactorSystem::FactorSystem(std::vector<Factor>      factors,
                             int                      free_rank,
                             std::vector<std::string> free_generators)
      : _factors(std::move(factors)),
        _free_rank(free_rank),
        _free_names(std::move(free_generators)) {
    if (free_rank < 0) {
      throw InputError("free_rank must be non-negative");
    }
    std::set<std::string> ids;
    for (auto& f : _factors) {
      if (f.rank < 1) {
        throw InputError("factor '" + f.id + "' has rank < 1");
      }
      if (!ids.insert(f.id).second) {
        throw InputError("duplicate factor id '" + f.id + "'");
      }
      if (f.generators.empty()) {
        if (f.rank == 1) {
          f.generators.push_back(f.id);
        } else {
          for (int j = 1; j <= f.rank; ++j) {
            f.generators.push_back(f.id + std::to_string(j));
          }
        }
      }
      if (static_cast<int>(f.generators.size()) != f.rank) {
        throw InputError("factor '" + f.id + "' lists "
                         + std::to_string(f.generators.size())
                         + " generators but has rank " + std::to_string(f.rank));
      }
    }
    if (_free_names.empty()) {
      for (int j = 1; j <= free_rank; ++j) {
        _free_names.push_back("x" + std::to_string(j));
      }
    }
    if (static_cast<int>(_free_names.size()) != free_rank) {
      throw InputError("free_generators has the wrong length");
    }
    for (size_t i = 0; i < _factors.size(); ++i) {
      _factor_gens.emplace_back();
      for (auto const& name : _factors[i].generators) {
        _factor_gens.back().push_back(static_cast<int>(_names.size()));
        _names.push_back(name);
        _origin.push_back(static_cast<int>(i));
      }
    }
    for (auto const& name : _free_names) {
      _free_gens.push_back(static_cast<int>(_names.size()));
      _names.push_back(name);
      _origin.push_back(-1);
    }
    std::set<std::string> seen;
    for (auto const& name : _names) {
      if (name.empty() || name == "1") {
        throw InputError("invalid generator name '" + name + "'");
      }
      for (char c : name) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) {
          throw InputError("invalid character in generator name '" + name + "'");
        }
      }
      if (!seen.insert(name).second) {
        throw InputError("duplicate generator name '" + name + "'");
      }
    }
  }

  int FactorSystem::factor_index(std::string_view id) const {
    for (size_t i = 0; i < _factors.size(); ++i) {
      if (_factors[i].id == id) {
        return static_cast<int>(i);
      }
    }
    return -1;
  }

  int FactorSystem::generator_index(std::string_view name) const {
    auto it = std::find(_names.begin(), _names.end(), name);
    return it == _names.end() ? -1 : static_cast<int>(it - _names.begin());
  }

  bool FactorSystem::standing_hypotheses() const {
    return _free_rank >= 2 || num_factors() + _free_rank >= 3;
  }

  ////////////////////////////////////////////////////////////////////////
  // FreeProduct
  ////////////////////////////////////////////////////////////////////////

  FreeProduct::FreeProduct(FactorSystem fs) : _fs(std::move(fs)) {}

  NormalForm FreeProduct::normalize(std::vector<Letter> const& raw) const {
    std::vector<Letter> out;
    out.reserve(raw.size());
    int const n = num_generators();
    for (Letter l : raw) {
      if (l == 0 || l > n || l < -n) {
        throw InputError("letter " + std::to_string(l) + " is not in the generating set");
      }
      if (!out.empty() && out.back() == -l) {
        out.pop_back();
      } else {
        out.push_back(l);
      }
    }
    return NormalForm(std::move(out));
  }

  namespace {
    bool is_space(char c) {
      return std::isspace(static_cast<unsigned char>(c)) || c == '.' || c == '*';
    }
  }  // namespace

  NormalForm FreeProduct::parse(std::string_view text) const {
    std::vector<Letter> raw;
    size_t              i = 0;
    auto                fail = [&](std::string const& why) {
      throw InputError("cannot parse word \"" + std::string(text) + "\" at position "
                       + std::to_string(i) + ": " + why);
    };
    while (i < text.size()) {
      if (is_space(text[i])) {
        ++i;
        continue;
      }
      // "1" on its own is the identity
      if (text[i] == '1' && (i + 1 == text.size() || is_space(text[i + 1]))) {
        ++i;
        continue;
      }
      // longest generator name matching here
      int    best = -1;
      size_t best_len = 0;
      for (int g = 0; g < num_generators(); ++g) {
        auto const& name = _fs.generator_name(g);
        if (name.size() > best_len && text.substr(i, name.size()) == name) {
          best = g;
          best_len = name.size();
        }
      }
      if (best < 0) {
        fail("unknown letter");
      }
      i += best_len;
      long exponent = 1;
      if (i < text.size() && text[i] == '^') {
        ++i;
        bool neg = false;
        if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
          neg = text[i] == '-';
          ++i;
        }
        size_t start = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
          ++i;
        }
        if (start == i) {
          fail("missing exponent");
        }
        exponent = std::stol(std::string(text.substr(start, i - start)));
        if (neg) {
          exponent = -exponent;
        }
      } else if (text.substr(i, 5) == "⁻¹") {  // superscript minus one
        exponent = -1;
        i += 5;
      }
      Letter l = exponent >= 0 ? best + 1 : -(best + 1);
      for (long k = 0; k < std::labs(exponent); ++k) {
        raw.push_back(l);
      }
    }
    return normalize(raw);
  }

  std::string FreeProduct::format(NormalForm const& x) const {
    if (x.is_identity()) {
      return "1";
    }
    std::string       out;
    auto const&       w = x.letters();
    size_t            i = 0;
    while (i < w.size()) {
      size_t j = i;
      while (j < w.size() && w[j] == w[i]) {
        ++j;
      }
      long run = static_cast<long>(j - i);
      if (!out.empty()) {
        out += ' ';
      }
      out += _fs.generator_name(generator_of(w[i]));
      long e = w[i] > 0 ? run : -run;
      if (e != 1) {
        out += '^' + std::to_string(e);
      }
      i = j;
    }
    return out;
  }

  NormalForm FreeProduct::multiply(NormalForm const& x, NormalForm const& y) const {
    auto const& a = x.letters();
    auto const& b = y.letters();
    size_t      k = 0;
    while (k < a.size() && k < b.size() && a[a.size() - 1 - k] == -b[k]) {
      ++k;
    }
    std::vector<Letter> out(a.begin(), a.end() - k);
    out.insert(out.end(), b.begin() + k, b.end());
    return NormalForm(std::move(out));
  }

  NormalForm FreeProduct::invert(NormalForm const& x) const {
    std::vector<Letter> out(x.letters().rbegin(), x.letters().rend());
    for (Letter& l : out) {
      l = -l;
    }
    return NormalForm(std::move(out));
  }

  NormalForm FreeProduct::power(NormalForm const& x, int n) const {
    NormalForm base = n >= 0 ? x : invert(x);
    NormalForm result;
    for (int k = 0; k < std::abs(n); ++k) {
      result = multiply(result, base);
    }
    return result;
  }

  std::vector<Syllable> FreeProduct::syllables(NormalForm const& x) const {
    std::vector<Syllable> out;
    for (Letter l : x.letters()) {
      int o = origin(l);
      bool extend = false;
      if (!out.empty() && out.back().origin == o) {
        // factor syllables are maximal; free syllables are powers of one letter
        extend = o >= 0 || out.back().word.back() == l;
      }
      if (extend) {
        out.back().word.push_back(l);
      } else {
        out.push_back({o, {l}});
      }
    }
    return out;
  }

  bool FreeProduct::in_factor(NormalForm const& x, int factor) const {
    return std::all_of(x.letters().begin(), x.letters().end(), [&](Letter l) {
      return origin(l) == factor;
    });
  }

  NormalForm FreeProduct::coset_rep(NormalForm const& x, int factor) const {
    auto w = x.letters();
    while (!w.empty() && origin(w.back()) == factor) {
      w.pop_back();
    }
    return NormalForm(std::move(w));
  }

  std::pair<NormalForm, NormalForm>
  FreeProduct::cyclic_decomposition(NormalForm const& x) const {
    auto const& w = x.letters();
    size_t      i = 0;
    size_t      j = w.size();
    while (j - i >= 2 && w[i] == -w[j - 1]) {
      ++i;
      --j;
    }
    return {NormalForm(std::vector<Letter>(w.begin(), w.begin() + i)),
            NormalForm(std::vector<Letter>(w.begin() + i, w.begin() + j))};
  }

  std::optional<EllipticInfo> FreeProduct::is_elliptic(NormalForm const& x) const {
    if (x.is_identity()) {
      throw InputError("is_elliptic: identity has no well-defined factor");
    }
    auto [u, c] = cyclic_decomposition(x);
    int  o = origin(c.letters().front());
    if (o < 0 || !in_factor(c, o)) {
      return std::nullopt;
    }
    return EllipticInfo{o, coset_rep(u, o)};
  }

  std::optional<NormalForm> FreeProduct::are_conjugate(NormalForm const& x,
                                                       NormalForm const& y) const {
    if (x.length() % 2 != y.length() % 2) {
      return std::nullopt;
    }
    auto [u1, c1] = cyclic_decomposition(x);
    auto [u2, c2] = cyclic_decomposition(y);
    if (c1.length() != c2.length()) {
      return std::nullopt;
    }
    if (c1.is_identity()) {
      return identity();
    }
    auto const&               a = c1.letters();
    auto const&               b = c2.letters();
    size_t const              n = a.size();
    std::optional<NormalForm> best;
    for (size_t k = 0; k < n; ++k) {
      bool ok = true;
      for (size_t i = 0; i < n && ok; ++i) {
        ok = a[(i + k) % n] == b[i];
      }
      if (!ok) {
        continue;
      }
      // c2 = p^-1 c1 p with p the first k letters of c1
      NormalForm p(std::vector<Letter>(a.begin(), a.begin() + k));
      NormalForm g = multiply(u2, invert(p), invert(u1));
      if (!best || g < *best) {
        best = g;
      }
    }
    return best;
  }

  std::vector<int> FreeProduct::all_generators() const {
    std::vector<int> out(num_generators());
    for (int g = 0; g < num_generators(); ++g) {
      out[g] = g;
    }
    return out;
  }

  std::vector<NormalForm> FreeProduct::words_up_to(std::vector<int> const& gens,
                                                   int                     max_len) const {
    std::vector<Letter> alphabet;
    for (int g : gens) {
      alphabet.push_back(g + 1);
      alphabet.push_back(-(g + 1));
    }
    std::sort(alphabet.begin(), alphabet.end());
    std::vector<NormalForm> out{NormalForm()};
    size_t                  layer_start = 0;
    for (int len = 1; len <= max_len; ++len) {
      size_t layer_end = out.size();
      for (size_t i = layer_start; i < layer_end; ++i) {
        for (Letter l : alphabet) {
          auto const& w = out[i].letters();
          if (!w.empty() && w.back() == -l) {
            continue;
          }
          auto v = w;
          v.push_back(l);
          out.emplace_back(std::move(v));
        }
      }
      layer_start = layer_end;
    }
    return out;
  }

}  // namespace flowcube
