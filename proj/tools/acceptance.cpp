// One pass/fail line per acceptance criterion. Tolerances and time limits
// are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "flowcube/io.hpp"
#include "flowcube/sageev.hpp"
#include "flowcube/walls.hpp"
#include "oracles.hpp"

using namespace flowcube;

namespace {

  constexpr double kStretchRelTol = 1e-9;
  constexpr double kLimit1 = 1, kLimit2 = 30, kLimit3 = 60, kLimit4 = 120, kLimit5 = 60, kLimit6 = 120,
                   kLimit7 = 30, kLimit8 = 120, kLimit9 = 60;
  constexpr int kRandomPoints = 200;
  constexpr int kGroupChecks = 10000;
  constexpr unsigned kSeed = 20261015;

  struct Outcome {
    bool        ok = true;
    std::string detail;

    void require(bool cond, std::string const& what) {
      if (!cond && ok) {
        ok = false;
        detail = what;
      }
    }
  };

  using Clock = std::chrono::steady_clock;

  double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  }

  TreeEdge base_edge(int e) { return TreeEdge{NormalForm(), e}; }

  WindowSpec tribonacci_window(Problem const& p) {
    WindowSpec s;
    s.lo = 0;
    s.hi = 4;
    s.radius = 2;
    s.angle_cap = 2;
    s.center = p.tree->base_vertex(0);
    return s;
  }

  constexpr int kWallLevel = 2;

  // 1. train tracks and stretch factors
  Outcome criterion1() {
    Outcome out;
    struct Case {
      char const*                  file;
      std::function<double(double)> poly;
    };
    for (auto const& c : {Case{"fibonacci.json", [](double x) { return x * x - x - 1; }},
                          Case{"tribonacci.json", [](double x) { return x * x * x - x - 1; }}}) {
      auto t0 = Clock::now();
      auto p = load_fixture(c.file);
      auto tt = is_train_track(p.map, 6);
      auto st = stretch_factor(transition_matrix(p.map), 1e-13);
      double dt = seconds_since(t0);
      double root = oracle::bisect_root(c.poly, 1, 2);
      double rel = std::abs(st.value - root) / root;
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s: lambda %.12f, oracle %.12f, rel err %.1e, %.3f s; ", c.file, st.value,
                    root, rel, dt);
      out.detail += buf;
      out.require(tt.ok, std::string(c.file) + " is not a train track");
      out.require(rel <= kStretchRelTol, std::string(c.file) + " stretch factor off");
      out.require(dt < kLimit1, std::string(c.file) + " too slow");
    }
    return out;
  }

  // 2. preimage certificates and singular preimages
  Outcome criterion2() {
    Outcome      out;
    std::mt19937 rng(kSeed);
    int          points = 0, singular = 0;
    std::vector<Problem> ps;
    for (auto f : {"fibonacci.json", "tribonacci.json", "cyclic3.json"}) {
      ps.push_back(load_fixture(f));
    }
    for (int k = 0; k < kRandomPoints; ++k) {
      auto const& p = ps[k % ps.size()];
      auto const& T = *p.tree;
      auto        ball = T.expand_ball(T.base_vertex(0), 3, 2);
      auto const& e = ball.edges[rng() % ball.edges.size()];
      long        den = 2 + static_cast<long>(rng() % 29);
      long        num = 1 + static_cast<long>(rng() % (den - 1));
      int         level = static_cast<int>(rng() % 4);
      auto        x = T.point(e, make_rational(num, den));
      auto        pre = preimages(p.map, {level, x});
      out.require(pre.complete && !pre.certificate.empty(), "no completeness certificate");
      // every edge of f(1, e') over the orbit of e gives exactly one preimage
      size_t expected = 0;
      for (int j = 0; j < p.map.num_edges(); ++j) {
        for (auto const& s : map_edge(p.map, base_edge(j)).steps) {
          expected += s.edge.edge == e.edge;
        }
      }
      out.require(pre.points.size() == expected, "preimage count differs from the edge-image count");
      for (auto const& q : pre.points) {
        out.require(q.level == level - 1 && map_point(p.map, q.point) == x, "a preimage does not map onto x");
      }
      ++points;
    }
    for (auto const& p : ps) {
      auto const& T = *p.tree;
      for (auto const& v : T.expand_ball(T.base_vertex(0), 3, 3).vertices) {
        if (!T.is_singular(v)) {
          continue;
        }
        auto pre = preimages(p.map, {0, TreePoint::at(v)});
        int  count = 0;
        for (auto const& q : pre.points) {
          count += q.point.on_vertex && T.is_singular(q.point.vertex);
        }
        out.require(count == 1 && pre.singular && map_vertex(p.map, *pre.singular) == v,
                    "singular vertex without a unique singular preimage");
        ++singular;
      }
    }
    out.require(singular > 0, "no singular vertex checked");
    out.detail = std::to_string(points) + " random points certified, " + std::to_string(singular)
                 + " singular vertices with one singular preimage; " + out.detail;
    return out;
  }

  // 3. periodic density on the Fibonacci fixture
  Outcome criterion3() {
    Outcome     out;
    auto        p = load_fixture("fibonacci.json");
    auto const& T = *p.tree;
    Rational    eps(1, 8);
    int         verified = 0;
    for (int e = 0; e < p.map.num_edges(); ++e) {
      auto ps = find_periodic_points(p.map, e, eps, 8);
      for (int k = 0; k < 8; ++k) {
        Rational lo(k, 8), hi(k + 1, 8);
        bool     hit = false;
        for (auto const& o : ps.orbits) {
          if (o.period <= 8 && lo <= o.offset && o.offset <= hi
              && map_point(p.map, o.point, o.period) == T.act(o.g, o.point)) {
            hit = true;
            break;
          }
        }
        out.require(hit, "edge " + std::to_string(e) + " subinterval " + std::to_string(k) + " has no periodic point");
        verified += hit;
      }
      for (auto const& o : ps.orbits) {
        out.require(map_point(p.map, o.point, o.period) == T.act(o.g, o.point), "reported orbit fails f^n x = g x");
      }
    }
    out.detail = std::to_string(verified) + " of 16 subintervals hold an exactly verified periodic point of period <= 8; "
                 + out.detail;
    return out;
  }

  struct TribWalls {
    int         L = 0;
    WallSearch  search;
    WallComplex complex;
    double      seconds = 0;
  };

  std::vector<TribWalls>& trib_walls() {
    static std::vector<TribWalls> cache = [] {
      std::vector<TribWalls> v;
      auto                   p = load_fixture("tribonacci.json");
      for (int L : {2, 3}) {
        auto      t0 = Clock::now();
        TribWalls w;
        w.L = L;
        w.search = search_wall_system(p.map, L, Rational(1, 4), tribonacci_window(p), kWallLevel, 10, 6, 400);
        if (w.search.found) {
          w.complex = assemble_walls(p.map, w.search.busts, tribonacci_window(p));
        }
        w.seconds = seconds_since(t0);
        v.push_back(std::move(w));
      }
      return v;
    }();
    return cache;
  }

  // 4. wall integrity on Tribonacci
  Outcome criterion4() {
    Outcome out;
    auto    p = load_fixture("tribonacci.json");
    for (auto& tw : trib_walls()) {
      auto tag = "L = " + std::to_string(tw.L);
      out.require(tw.search.found, tag + ": no bust system found (" + tw.search.blocking + ")");
      if (!tw.search.found) {
        continue;
      }
      out.require(verify_bust_conditions(p.map, tw.search.busts, 6).ok, tag + ": bust conditions fail");
      int audited = 0;
      for (int e = 0; e < p.map.num_edges(); ++e) {
        auto sep = check_separation(tw.complex, {tw.complex.component_of_bust(base_edge(e), kWallLevel)});
        bool frontier = true;
        for (auto const& c : sep.classes) {
          if (c.side == -1 || c.side == 1) {
            frontier = frontier && c.frontier;
          }
        }
        out.require(sep.components == 2, tag + ": complementary components != 2");
        out.require(frontier, tag + ": a side misses the frontier");
        out.require(sep.same_side_busts, tag + ": same-side audit fails");
        audited += sep.busts_audited;
      }
      out.require(tw.seconds < kLimit4, tag + ": too slow");
      char buf[120];
      std::snprintf(buf, sizeof buf, "L = %d: %d trials, 2 components for all %d walls, %d busts audited, %.2f s; ",
                    tw.L, tw.search.trials, p.map.num_edges(), audited, tw.seconds);
      out.detail += buf;
    }
    return out;
  }

  // 5. approximations are trees; the adversarial system is not
  Outcome criterion5() {
    Outcome out;
    auto    p = load_fixture("tribonacci.json");
    for (auto& tw : trib_walls()) {
      if (!tw.search.found) {
        out.require(false, "no wall system for L = " + std::to_string(tw.L));
        continue;
      }
      for (int e = 0; e < p.map.num_edges(); ++e) {
        auto a = approximate_wall(tw.complex, {tw.complex.component_of_bust(base_edge(e), kWallLevel)});
        out.require(a.is_tree, "L = " + std::to_string(tw.L) + ": approximation is not a tree");
      }
    }
    // greedy targets at L = 2: the wall through the middle level crosses itself
    auto bs = search_busts(p.map, choose_targets(p.map, 2, 10), Rational(1, 4), 2, 6);
    out.require(bs.found, "adversarial bust system not found");
    int cycles = 0;
    if (bs.found) {
      auto w = assemble_walls(p.map, bs.system, tribonacci_window(p));
      bool any = false;
      for (int e = 0; e < p.map.num_edges(); ++e) {
        auto a = approximate_wall(w, {w.component_of_bust(base_edge(e), kWallLevel)});
        if (!a.is_tree) {
          any = true;
          cycles = std::max(cycles, a.cycles);
        }
      }
      out.require(any, "adversarial approximation is a tree");
    }
    out.detail = "is_tree for L = 2, 3; adversarial L = 2 system has " + std::to_string(cycles) + " cycles; "
                 + out.detail;
    return out;
  }

  // 6. saturation
  Outcome criterion6() {
    Outcome out;
    int     checked = 0, with_lines = 0, grown = 0;
    auto    check = [&](WallComplex const& w, int comp, int M) {
      auto sat = saturate_wall(w, comp, M);
      auto again = saturate_wall(w, sat);
      auto aud = audit_saturation(w, sat);
      out.require(again.components == sat.components && again.lines.size() == sat.lines.size(),
                  "saturation not idempotent");
      out.require(sat.connected, "saturation not connected");
      out.require(aud.ok, "audit: " + aud.detail);
      ++checked;
      with_lines += !sat.lines.empty();
      grown += sat.components.size() > 1;
    };
    auto p = load_fixture("tribonacci.json");
    for (auto& tw : trib_walls()) {
      if (tw.search.found) {
        for (int e = 0; e < p.map.num_edges(); ++e) {
          check(tw.complex, tw.complex.component_of_bust(base_edge(e), kWallLevel), 2 * tw.L);
        }
      }
    }
    // cyclic3 has singular vertices; every component of a window is saturated
    auto c3 = load_fixture("cyclic3.json");
    auto bs = search_busts(c3.map, choose_targets(c3.map, 1, 8), Rational(1, 4), 1, 6);
    out.require(bs.found, "no cyclic3 bust system");
    if (bs.found) {
      auto spec = tribonacci_window(c3);
      auto w = assemble_walls(c3.map, bs.system, spec);
      for (int c = 0; c < static_cast<int>(w.components.size()); ++c) {
        check(w, c, 2);
      }
    }
    out.require(with_lines > 0 && grown > 0, "no saturation with lines or added components");
    out.detail = std::to_string(checked) + " saturations, " + std::to_string(with_lines) + " with principal lines, "
                 + std::to_string(grown) + " with added components; " + out.detail;
    return out;
  }

  // AHU code of an unrooted tree
  std::string tree_code(std::vector<std::vector<int>> const& adj) {
    int              n = static_cast<int>(adj.size());
    std::vector<int> deg(n), layer;
    for (int v = 0; v < n; ++v) {
      deg[v] = static_cast<int>(adj[v].size());
      if (deg[v] <= 1) {
        layer.push_back(v);
      }
    }
    for (int left = n; left > 2;) {
      left -= static_cast<int>(layer.size());
      std::vector<int> next;
      for (int v : layer) {
        for (int u : adj[v]) {
          if (--deg[u] == 1) {
            next.push_back(u);
          }
        }
      }
      layer = next;
    }
    std::function<std::string(int, int)> code = [&](int v, int parent) {
      std::vector<std::string> kids;
      for (int u : adj[v]) {
        if (u != parent) {
          kids.push_back(code(u, v));
        }
      }
      std::sort(kids.begin(), kids.end());
      std::string s = "(";
      for (auto const& k : kids) {
        s += k;
      }
      return s + ")";
    };
    std::string best;
    for (int c : layer) {
      auto s = code(c, -1);
      best = best.empty() || s < best ? s : best;
    }
    return best;
  }

  // 7. Sageev duality
  Outcome criterion7() {
    Outcome out;
    int     outputs = 0;
    auto    certify = [&](DualCubeComplex const& cc, FiniteWallspace const& ws) {
      out.require(is_median(cc).ok, "dual is not median");
      out.require(link_flag_check(cc).ok, "dual has a non-flag link");
      out.require(verify_hyperplanes(cc, ws).ok, "hyperplanes do not match walls");
      ++outputs;
    };
    for (int n = 1; n <= 4; ++n) {
      auto ws = crossing_wallspace(n);
      auto cc = build_dual(ws);
      out.require(cc.vertices.size() == static_cast<size_t>(1 << n) && cc.dimension() == n,
                  std::to_string(n) + "-cube not reproduced");
      certify(cc, ws);
    }
    std::mt19937 rng(kSeed);
    int          trees = 0;
    for (int k = 0; k < 50; ++k) {
      int                              n = 2 + static_cast<int>(rng() % 15);
      std::vector<std::pair<int, int>> edges;
      std::vector<std::vector<int>>    adj(n);
      for (int v = 1; v < n; ++v) {
        int u = static_cast<int>(rng() % v);
        edges.push_back({u, v});
        adj[u].push_back(v);
        adj[v].push_back(u);
      }
      auto ws = tree_wallspace(n, edges);
      auto cc = build_dual(ws);
      out.require(cc.vertices.size() == static_cast<size_t>(n) && tree_code(cc.adjacency()) == tree_code(adj),
                  "tree not reproduced");
      certify(cc, ws);
      ++trees;
    }
    out.detail = "n-cubes n <= 4, " + std::to_string(trees) + " random trees isomorphic, " + std::to_string(outputs)
                 + " outputs median and flag; " + out.detail;
    return out;
  }

  // 8. cut proxies on cyclic3
  Outcome criterion8() {
    Outcome     out;
    auto        p = load_fixture("cyclic3.json");
    auto const& T = *p.tree;
    auto        spec = tribonacci_window(p);
    auto        a = T.base_vertex(1), b = T.base_vertex(2);
    auto        s = search_cut_wall(p.map, 1, Rational(1, 4), spec, kWallLevel, a, b, 2, 6, 6, 400);
    out.require(s.found, "no centered wall cuts the lines: " + s.blocking);
    if (!s.found) {
      return out;
    }
    auto w = assemble_walls(p.map, s.busts, spec);
    int  comp = w.component_of_node.at(
        w.node_index.at(NodeKey{NodeKind::primary_end, kWallLevel, base_edge(s.edge), {}, -1, s.sign}));
    auto sat = saturate_wall(w, comp, 2);
    auto la = window_line(w, a, kWallLevel), lb = window_line(w, b, kWallLevel);
    auto pair = check_cut(w, sat, la, lb);
    auto ca = check_cut(w, sat, la), cb = check_cut(w, sat, lb);
    out.require(pair.verdict == "separated", "pair verdict " + pair.verdict);
    out.require(ca.verdict == "same side" && cb.verdict == "same side", "a line's ends are separated");
    out.detail = "pair: " + pair.verdict + ", line A: not separated, line B: not separated, " + std::to_string(s.trials)
                 + " trials; " + out.detail;
    return out;
  }

  // 9. group laws and bounded atoroidality
  Outcome criterion9() {
    Outcome      out;
    std::mt19937 rng(kSeed);
    long         checks = 0;
    for (auto phi : {oracle::fibonacci_automorphism(), oracle::tribonacci_automorphism()}) {
      auto const& G = phi.group();
      int         gens = static_cast<int>(phi.images().size());
      for (int k = 0; k < kGroupChecks / 2; ++k) {
        auto x = G.normalize(oracle::random_raw(rng, gens, 10));
        auto y = G.normalize(oracle::random_raw(rng, gens, 10));
        auto z = G.normalize(oracle::random_raw(rng, gens, 10));
        bool ok = G.multiply(x, y).letters() == oracle::naive_reduce(oracle::concat(x.letters(), y.letters()))
                  && G.multiply(G.multiply(x, y), z) == G.multiply(x, G.multiply(y, z))
                  && G.multiply(x, G.invert(x)).is_identity()
                  && phi.apply(phi.apply(x), -1) == x && phi.apply(phi.apply(x, -1)) == x
                  && phi.apply(G.multiply(x, y)) == G.multiply(phi.apply(x), phi.apply(y));
        out.require(ok, "group law failure");
        ++checks;
      }
    }
    auto fib = oracle::fibonacci_automorphism();
    auto FG = fib.group_ptr();
    auto comm = FG->parse("a b a^-1 b^-1");
    bool found = false;
    for (auto const& v : check_atoroidal_bounded(fib, 4, 6)) {
      found = found || oracle::cyclically_equal(v.g.letters(), comm.letters())
              || oracle::cyclically_equal(v.g.letters(), FG->invert(comm).letters());
    }
    out.require(found, "Fibonacci commutator not detected");
    auto tv = check_atoroidal_bounded(oracle::tribonacci_automorphism(), 4, 6);
    out.require(tv.empty(), "spurious Tribonacci violation");
    out.detail = std::to_string(checks) + " randomized law checks, commutator detected, Tribonacci clean; "
                 + out.detail;
    return out;
  }

}  // namespace

int main() {
  struct Criterion {
    int                      n;
    double                   limit;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> all{{1, 2 * kLimit1, criterion1}, {2, kLimit2, criterion2}, {3, kLimit3, criterion3},
                             {4, 2 * kLimit4, criterion4}, {5, kLimit5, criterion5}, {6, kLimit6, criterion6},
                             {7, kLimit7, criterion7}, {8, kLimit8, criterion8}, {9, kLimit9, criterion9}};
  int failed = 0;
  for (auto const& c : all) {
    auto    t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (std::exception const& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double dt = seconds_since(t0);
    if (dt >= c.limit) {
      o.ok = false;
      o.detail += " time limit exceeded;";
    }
    std::printf("criterion %d: %s  %.2f s  %s\n", c.n, o.ok ? "PASS" : "FAIL", dt, o.detail.c_str());
    failed += !o.ok;
  }
  return failed == 0 ? 0 : 1;
}
