#include "flowcube/automorphism.hpp"

#include <numeric>

#include "flowcube/errors.hpp"

namespace flowcube {

  Automorphism::Automorphism(std::shared_ptr<FreeProduct const> group,
                             std::vector<NormalForm>            images,
                             std::vector<NormalForm>            inverse_images)
      : _group(std::move(group)), _images(std::move(images)), _inverse(std::move(inverse_images)) {
    int n = _group->num_generators();
    if (static_cast<int>(_images.size()) != n || static_cast<int>(_inverse.size()) != n) {
      throw InputError("automorphism must give an image and an inverse image for every generator");
    }
  }

  NormalForm Automorphism::substitute(NormalForm const&              x,
                                      std::vector<NormalForm> const& table) const {
    NormalForm out;
    for (Letter l : x.letters()) {
      auto const& img = table[generator_of(l)];
      out = _group->multiply(out, l > 0 ? img : _group->invert(img));
    }
    return out;
  }

  NormalForm Automorphism::apply(NormalForm const& x, int power) const {
    NormalForm out = x;
    auto const& table = power >= 0 ? _images : _inverse;
    for (int k = 0; k < std::abs(power); ++k) {
      out = substitute(out, table);
    }
    return out;
  }

  Automorphism Automorphism::power(int n) const {
    std::vector<NormalForm> fwd, bwd;
    for (int g = 0; g < _group->num_generators(); ++g) {
      fwd.push_back(apply(_group->generator(g), n));
      bwd.push_back(apply(_group->generator(g), -n));
    }
    return Automorphism(_group, std::move(fwd), std::move(bwd));
  }

  AutomorphismReport verify_automorphism(Automorphism const& phi) {
    AutomorphismReport rep;
    auto const&        G = phi.group();
    auto const&        fs = G.system();
    for (int g = 0; g < G.num_generators(); ++g) {
      auto x = G.generator(g);
      if (phi.apply(phi.apply(x, 1), -1) != x || phi.apply(phi.apply(x, -1), 1) != x) {
        rep.failure = "inverse images do not invert the images at generator "
                      + fs.generator_name(g);
        rep.offending_generator = g;
        return rep;
      }
    }
    rep.invertible = true;

    // For each factor, every generator image must be elliptic in one common
    // conjugate g H_j g^-1; the inverse must do the same with sigma^-1.
    auto factor_map = [&](int power, std::vector<int>& sigma, std::vector<NormalForm>& conj) {
      sigma.assign(fs.num_factors(), -1);
      conj.assign(fs.num_factors(), NormalForm());
      for (int i = 0; i < fs.num_factors(); ++i) {
        for (int g : fs.factor_generators(i)) {
          auto img = phi.apply(G.generator(g), power);
          auto ell = G.is_elliptic(img);
          if (!ell) {
            rep.failure = "image of factor generator " + fs.generator_name(g)
                          + " is loxodromic: " + G.format(img);
            rep.offending_generator = g;
            return false;
          }
          if (sigma[i] < 0) {
            sigma[i] = ell->factor;
            conj[i] = ell->conjugator;
          } else if (sigma[i] != ell->factor || conj[i] != ell->conjugator) {
            rep.failure = "images of factor " + fs.factors()[i].id
                          + " are not in a common conjugate of one factor (generator "
                          + fs.generator_name(g) + ")";
            rep.offending_generator = g;
            return false;
          }
        }
      }
      std::vector<int> seen(fs.num_factors(), 0);
      for (int j : sigma) {
        if (seen[j]++) {
          rep.failure = "factor map is not a permutation";
          return false;
        }
      }
      return true;
    };
    std::vector<int>        inv_sigma;
    std::vector<NormalForm> inv_conj;
    if (!factor_map(1, rep.sigma, rep.conjugators) || !factor_map(-1, inv_sigma, inv_conj)) {
      return rep;
    }
    for (int i = 0; i < fs.num_factors(); ++i) {
      if (inv_sigma[rep.sigma[i]] != i) {
        rep.failure = "inverse does not induce the inverse factor permutation";
        return rep;
      }
    }
    rep.ok = true;
    return rep;
  }

  namespace {
    // Cyclically reduced words of length 1..max_len.
    std::vector<NormalForm> cyclically_reduced_words(FreeProduct const& G, int max_len) {
      std::vector<NormalForm> out;
      for (auto& w : G.words_up_to(G.all_generators(), max_len)) {
        if (w.is_identity()) {
          continue;
        }
        auto const& l = w.letters();
        if (l.size() > 1 && l.front() == -l.back()) {
          continue;
        }
        out.push_back(std::move(w));
      }
      return out;
    }
  }  // namespace

  std::vector<ToroidalViolation>
  check_atoroidal_bounded(Automorphism const& phi, int max_len, int max_power) {
    if (max_len < 1 || max_power < 1) {
      throw InputError("check_atoroidal_bounded: bounds must be positive");
    }
    auto const&                    G = phi.group();
    std::vector<ToroidalViolation> out;
    for (auto const& g : cyclically_reduced_words(G, max_len)) {
      if (G.is_elliptic(g)) {
        continue;
      }
      NormalForm img = g;
      for (int n = 1; n <= max_power; ++n) {
        img = phi.apply(img, 1);
        if (auto c = G.are_conjugate(g, img)) {
          out.push_back({g, n, *c});
        }
      }
    }
    return out;
  }

  TwinReport check_no_twins_bounded(Automorphism const& phi, int max_power, int max_conj_len) {
    TwinReport  rep;
    auto const& G = phi.group();
    auto const& fs = G.system();
    if (fs.num_factors() < 2) {
      rep.vacuous = true;
      return rep;
    }
    auto candidates = G.words_up_to(G.all_generators(), max_conj_len);
    for (int m = 1; m <= max_power; ++m) {
      auto vr = verify_automorphism(phi.power(m));
      if (!vr.ok) {
        throw InputError("check_no_twins_bounded: " + vr.failure);
      }
      for (int k = 0; k < fs.num_factors(); ++k) {
        if (vr.sigma[k] != k) {
          continue;
        }
        auto const ck = G.coset_rep(vr.conjugators[k], k);
        for (int h = 0; h < fs.num_factors(); ++h) {
          if (h == k) {
            continue;
          }
          bool const h_fixed = vr.sigma[h] == h;
          auto const ch = G.coset_rep(vr.conjugators[h], h);
          for (auto const& g : candidates) {
            // g K g^-1 = c K c^-1 iff g H_K = c H_K (factors are self-normalizing)
            if (G.coset_rep(g, k) != ck) {
              continue;
            }
            bool twin = h_fixed && G.coset_rep(g, h) == ch;
            rep.witnesses.push_back({h, k, m, g, twin});
            rep.twin_found = rep.twin_found || twin;
          }
        }
      }
    }
    return rep;
  }

}  // namespace flowcube
