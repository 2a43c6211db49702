#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flowcube/freeprod.hpp"

namespace flowcube {

  class Automorphism {
   public:
    Automorphism() = default;
    Automorphism(std::shared_ptr<FreeProduct const> group,
                 std::vector<NormalForm>            images,
                 std::vector<NormalForm>            inverse_images);

    FreeProduct const&                        group() const { return *_group; }
    std::shared_ptr<FreeProduct const> const& group_ptr() const { return _group; }
    std::vector<NormalForm> const&            images() const { return _images; }
    std::vector<NormalForm> const&            inverse_images() const { return _inverse; }

    // phi^power(x); negative powers use the inverse images.
    NormalForm apply(NormalForm const& x, int power = 1) const;

    Automorphism inverse() const { return Automorphism(_group, _inverse, _images); }
    Automorphism power(int n) const;
    bool         operator==(Automorphism const& other) const {
      return _images == other._images && _inverse == other._inverse;
    }

   private:
    NormalForm substitute(NormalForm const& x, std::vector<NormalForm> const& table) const;

    std::shared_ptr<FreeProduct const> _group;
    std::vector<NormalForm>            _images;
    std::vector<NormalForm>            _inverse;
  };

  struct AutomorphismReport {
    bool        ok = false;
    bool        invertible = false;
    std::string failure;
    int         offending_generator = -1;
    // sigma[i] = factor index j with phi(H_i) = g_i H_j g_i^-1
    std::vector<int>        sigma;
    std::vector<NormalForm> conjugators;
  };

  AutomorphismReport verify_automorphism(Automorphism const& phi);

  struct ToroidalViolation {
    NormalForm g;
    int        n;
    NormalForm conjugator;  // conjugator * g * conjugator^-1 = phi^n(g)
  };

  // Empty result means "no violation found at this scale", not a proof.
  std::vector<ToroidalViolation>
  check_atoroidal_bounded(Automorphism const& phi, int max_len, int max_power);

  struct TwinWitness {
    int        h;  // factor indices
    int        k;
    int        m;
    NormalForm g;
    bool       twin;  // phi^m(H) = g H g^-1 as well
  };

  struct TwinReport {
    bool                     vacuous = false;
    bool                     twin_found = false;
    std::vector<TwinWitness> witnesses;
  };

  TwinReport check_no_twins_bounded(Automorphism const& phi, int max_power, int max_conj_len);

}  // namespace flowcube
