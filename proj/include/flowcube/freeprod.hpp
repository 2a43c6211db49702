#pragma once

// Free products G = H_1 * ... * H_k * F_r of finitely generated free groups.
// Since every factor is free, G itself is free on the union of the factor
// bases and the free part, so normal forms are freely reduced words and the
// syllable structure is read off from the letter origins.

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flowcube {

  // A letter is +(g+1) for generator g and -(g+1) for its inverse.
  using Letter = int;

  inline int generator_of(Letter l) { return (l > 0 ? l : -l) - 1; }

  struct Factor {
    std::string              id;
    int                      rank = 1;
    std::vector<std::string> generators;  // names, size == rank
  };

  class FactorSystem {
   public:
    FactorSystem() = default;
    // Generator names default to the id (rank 1) or id1, id2, ... and the
    // free generators default to x1, x2, ... when not supplied.
    FactorSystem(std::vector<Factor>      factors,
                 int                      free_rank,
                 std::vector<std::string> free_generators = {});

    std::vector<Factor> const&      factors() const { return _factors; }
    int                             num_factors() const { return static_cast<int>(_factors.size()); }
    int                             free_rank() const { return _free_rank; }
    std::vector<std::string> const& free_generators() const { return _free_names; }

    int num_generators() const { return static_cast<int>(_names.size()); }
    // -1 for the free part
    int  origin(int generator) const { return _origin[generator]; }
    int  factor_index(std::string_view id) const;
    int  generator_index(std::string_view name) const;  // -1 if unknown
    // Global indices of the generators of factor i.
    std::vector<int> const& factor_generators(int i) const { return _factor_gens[i]; }
    std::vector<int> const& free_part_generators() const { return _free_gens; }
    std::string const&      generator_name(int g) const { return _names[g]; }

    // r >= 2 or k + r >= 3
    bool standing_hypotheses() const;

    bool operator==(FactorSystem const&) const = default;

   private:
    std::vector<Factor>           _factors;
    int                           _free_rank = 0;
    std::vector<std::string>      _free_names;
    std::vector<std::string>      _names;
    std::vector<int>              _origin;
    std::vector<std::vector<int>> _factor_gens;
    std::vector<int>              _free_gens;
  };

  class NormalForm {
   public:
    NormalForm() = default;
    // The caller guarantees the word is freely reduced.
    explicit NormalForm(std::vector<Letter> reduced) : _letters(std::move(reduced)) {}

    std::vector<Letter> const& letters() const { return _letters; }
    size_t                     length() const { return _letters.size(); }
    bool                       is_identity() const { return _letters.empty(); }

    bool operator==(NormalForm const&) const = default;
    // shortlex
    std::strong_ordering operator<=>(NormalForm const& other) const {
      if (_letters.size() != other._letters.size()) {
        return _letters.size() <=> other._letters.size();
      }
      return _letters <=> other._letters;
    }

   private:
    std::vector<Letter> _letters;
  };

  struct NormalFormHash {
    size_t operator()(NormalForm const& x) const {
      size_t h = 1469598103934665603ULL;
      for (Letter l : x.letters()) {
        h ^= static_cast<size_t>(l + 1000);
        h *= 1099511628211ULL;
      }
      return h;
    }
  };

  struct Syllable {
    int                 origin;  // factor index, or -1 for the free part
    std::vector<Letter> word;
    bool                operator==(Syllable const&) const = default;
  };

  struct EllipticInfo {
    int        factor;
    NormalForm conjugator;  // x lies in conjugator * H_factor * conjugator^-1
  };

  class FreeProduct {
   public:
    explicit FreeProduct(FactorSystem fs);

    FactorSystem const& system() const { return _fs; }
    int                 num_generators() const { return _fs.num_generators(); }
    int                 origin(Letter l) const { return _fs.origin(generator_of(l)); }

    NormalForm normalize(std::vector<Letter> const& raw) const;
    NormalForm parse(std::string_view text) const;
    std::string format(NormalForm const& x) const;

    NormalForm identity() const { return {}; }
    NormalForm generator(int g) const { return NormalForm({g + 1}); }
    NormalForm multiply(NormalForm const& x, NormalForm const& y) const;
    NormalForm multiply(NormalForm const& x, NormalForm const& y, NormalForm const& z) const {
      return multiply(multiply(x, y), z);
    }
    NormalForm invert(NormalForm const& x) const;
    NormalForm power(NormalForm const& x, int n) const;
    NormalForm conjugate(NormalForm const& g, NormalForm const& x) const {
      return multiply(g, x, invert(g));
    }

    std::vector<Syllable> syllables(NormalForm const& x) const;
    bool                  in_factor(NormalForm const& x, int factor) const;
    // Shortlex-minimal representative of the coset x * H_factor.
    NormalForm coset_rep(NormalForm const& x, int factor) const;

    // x = u c u^-1 with c cyclically reduced.
    std::pair<NormalForm, NormalForm> cyclic_decomposition(NormalForm const& x) const;

    std::optional<EllipticInfo> is_elliptic(NormalForm const& x) const;
    // g with g x g^-1 = y
    std::optional<NormalForm> are_conjugate(NormalForm const& x, NormalForm const& y) const;

    // All reduced words of length <= max_len over the given generators,
    // in shortlex order (identity first).
    std::vector<NormalForm> words_up_to(std::vector<int> const& gens, int max_len) const;
    std::vector<NormalForm> factor_words(int factor, int max_len) const {
      return words_up_to(_fs.factor_generators(factor), max_len);
    }
    std::vector<int> all_generators() const;

   private:
    FactorSystem _fs;
  };

}  // namespace flowcube

template <>
struct std::hash<flowcube::NormalForm> : flowcube::NormalFormHash {};
