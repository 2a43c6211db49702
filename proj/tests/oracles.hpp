#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "flowcube/automorphism.hpp"
#include "flowcube/freeprod.hpp"

namespace oracle {

  using flowcube::Letter;

  inline std::shared_ptr<flowcube::FreeProduct const> free_group(std::vector<std::string> names) {
    int n = static_cast<int>(names.size());
    return std::make_shared<flowcube::FreeProduct const>(
        flowcube::FactorSystem({}, n, std::move(names)));
  }

  // Repeatedly deletes the first adjacent cancelling pair until none is left.
  inline std::vector<Letter> naive_reduce(std::vector<Letter> w) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t i = 0; i + 1 < w.size(); ++i) {
        if (w[i] == -w[i + 1]) {
          w.erase(w.begin() + i, w.begin() + i + 2);
          changed = true;
          break;
        }
      }
    }
    return w;
  }

  inline std::vector<Letter> concat(std::vector<Letter> a, std::vector<Letter> const& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }

  inline std::vector<Letter> random_raw(std::mt19937& rng, int gens, int max_len) {
    std::uniform_int_distribution<int> len(0, max_len);
    std::uniform_int_distribution<int> g(1, gens);
    std::uniform_int_distribution<int> sign(0, 1);
    std::vector<Letter>                out(len(rng));
    for (auto& l : out) {
      l = sign(rng) ? g(rng) : -g(rng);
    }
    return out;
  }

  // Conjugacy in a free group: cyclically reduce and compare all rotations.
  inline bool cyclically_equal(std::vector<Letter> x, std::vector<Letter> y) {
    auto cyc = [](std::vector<Letter> w) {
      w = naive_reduce(w);
      while (w.size() > 1 && w.front() == -w.back()) {
        w.erase(w.begin());
        w.pop_back();
      }
      return w;
    };
    x = cyc(x);
    y = cyc(y);
    if (x.size() != y.size()) {
      return false;
    }
    for (size_t r = 0; r <= x.size(); ++r) {
      std::vector<Letter> rot(x.begin() + (x.empty() ? 0 : r % x.size()), x.end());
      rot.insert(rot.end(), x.begin(), x.begin() + (x.empty() ? 0 : r % x.size()));
      if (rot == y) {
        return true;
      }
    }
    return false;
  }

  inline flowcube::Automorphism fibonacci_automorphism() {
    auto G = free_group({"a", "b"});
    return flowcube::Automorphism(G, {G->parse("a b"), G->parse("a")},
                                  {G->parse("b"), G->parse("b^-1 a")});
  }

  inline flowcube::Automorphism tribonacci_automorphism() {
    auto G = free_group({"a", "b", "c"});
    return flowcube::Automorphism(G, {G->parse("b"), G->parse("c"), G->parse("a b")},
                                  {G->parse("c a^-1"), G->parse("a"), G->parse("b")});
  }

  // Largest real root of a monic polynomial (coefficients high to low) in
  // [lo, hi] by bisection, assuming a sign change there.
  inline double bisect_root(std::function<double(double)> const& p, double lo, double hi) {
    double plo = p(lo);
    for (int i = 0; i < 200; ++i) {
      double mid = 0.5 * (lo + hi);
      double pm = p(mid);
      if ((pm < 0) == (plo < 0)) {
        lo = mid;
        plo = pm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

}  // namespace oracle
