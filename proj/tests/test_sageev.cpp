#include <algorithm>
#include <deque>
#include <functional>
#include <json.hpp>
#include <random>
#include <set>

#include "doctest.h"
#include "flowcube/errors.hpp"
#include "flowcube/io.hpp"
#include "flowcube/sageev.hpp"

using namespace flowcube;

namespace {
  // Every orientation of the walls, kept when all pairs of chosen halfspaces meet.
  std::set<std::vector<int>> brute_orientations(FiniteWallspace const& ws) {
    int                        n = ws.num_walls();
    std::set<std::vector<int>> out;
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<int> o(n);
      for (int w = 0; w < n; ++w) {
        o[w] = mask >> w & 1 ? 1 : -1;
      }
      bool ok = true;
      for (int a = 0; a < n && ok; ++a) {
        for (int b = a + 1; b < n && ok; ++b) {
          bool meet = false;
          for (int p = 0; p < ws.points && !meet; ++p) {
            meet = ws.sides[a][p] == o[a] && ws.sides[b][p] == o[b];
          }
          ok = meet;
        }
      }
      if (ok) {
        out.insert(o);
      }
    }
    return out;
  }

  long binom(int n, int k) {
    long r = 1;
    for (int i = 0; i < k; ++i) {
      r = r * (n - i) / (i + 1);
    }
    return r;
  }

  // AHU canonical string of an unrooted tree, rooted at each center.
  std::string ahu(std::vector<std::vector<int>> const& adj) {
    int              n = static_cast<int>(adj.size());
    std::vector<int> deg(n), layer;
    for (int v = 0; v < n; ++v) {
      deg[v] = static_cast<int>(adj[v].size());
      if (deg[v] <= 1) {
        layer.push_back(v);
      }
    }
    int left = n;
    while (left > 2) {
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
      if (best.empty() || s < best) {
        best = s;
      }
    }
    return best;
  }

  std::vector<std::pair<int, int>> random_tree(int n, std::mt19937& rng) {
    std::vector<std::pair<int, int>> edges;
    for (int v = 1; v < n; ++v) {
      edges.push_back({static_cast<int>(rng() % v), v});
    }
    return edges;
  }

  // Points of a grid cut by random affine lines.
  FiniteWallspace random_plane_wallspace(int walls, std::mt19937& rng) {
    FiniteWallspace                   ws;
    std::vector<std::pair<int, int>>  pts;
    for (int x = 0; x < 6; ++x) {
      for (int y = 0; y < 6; ++y) {
        pts.push_back({x, y});
      }
    }
    ws.points = static_cast<int>(pts.size());
    while (ws.num_walls() < walls) {
      int              a = static_cast<int>(rng() % 7) - 3, b = static_cast<int>(rng() % 7) - 3;
      int              c = static_cast<int>(rng() % 31) - 15;
      std::vector<int> side;
      bool             neg = false, pos = false, zero = false;
      for (auto const& [x, y] : pts) {
        int v = 2 * (a * x + b * y) - 2 * c + 1;  // odd, never zero
        zero = zero || (a == 0 && b == 0);
        side.push_back(v > 0 ? 1 : -1);
        (v > 0 ? pos : neg) = true;
      }
      auto flipped = side;
      for (int& x : flipped) {
        x = -x;
      }
      bool fresh = std::find(ws.sides.begin(), ws.sides.end(), side) == ws.sides.end()
                   && std::find(ws.sides.begin(), ws.sides.end(), flipped) == ws.sides.end();
      if (!zero && pos && neg && fresh) {
        ws.sides.push_back(side);
      }
    }
    return ws;
  }

  int flip_distance(DualCubeComplex const& cc, int a, int b) {
    auto             adj = cc.adjacency();
    std::vector<int> d(adj.size(), -1);
    std::deque<int>  q{a};
    d[a] = 0;
    while (!q.empty()) {
      int x = q.front();
      q.pop_front();
      for (int y : adj[x]) {
        if (d[y] < 0) {
          d[y] = d[x] + 1;
          q.push_back(y);
        }
      }
    }
    return d[b];
  }
}  // namespace

TEST_CASE("n-cubes") {
  for (int n = 1; n <= 4; ++n) {
    auto ws = crossing_wallspace(n);
    auto cc = build_dual(ws);
    CHECK(cc.vertices.size() == static_cast<size_t>(1 << n));
    CHECK(cc.edges.size() == static_cast<size_t>(n << (n - 1)));
    long cubes = 0;
    for (int k = 2; k <= n; ++k) {
      cubes += binom(n, k) << (n - k);
    }
    CHECK(static_cast<long>(cc.cubes.size()) == cubes);
    CHECK(cc.dimension() == n);
    CHECK(is_median(cc).ok);
    CHECK(link_flag_check(cc).ok);
    auto h = verify_hyperplanes(cc, ws);
    CHECK(h.ok);
    CHECK(h.hyperplanes == n);
  }
}

TEST_CASE("small wallspaces") {
  SUBCASE("one wall") {
    auto cc = build_dual(crossing_wallspace(1));
    CHECK(cc.vertices.size() == 2);
    CHECK(cc.edges.size() == 1);
    CHECK(verify_hyperplanes(cc, crossing_wallspace(1)).hyperplanes == 1);
  }
  SUBCASE("two nested walls give a path") {
    FiniteWallspace ws;
    ws.points = 3;
    ws.sides = {{-1, 1, 1}, {-1, -1, 1}};
    auto cc = build_dual(ws);
    CHECK(cc.vertices.size() == 3);
    CHECK(cc.edges.size() == 2);
    CHECK(cc.cubes.empty());
    auto h = verify_hyperplanes(cc, ws);
    CHECK(h.ok);
    CHECK(h.hyperplanes == 2);
  }
  SUBCASE("square") {
    auto ws = crossing_wallspace(2);
    auto cc = build_dual(ws);
    REQUIRE(cc.cubes.size() == 1);
    CHECK(cc.cubes[0].walls == std::vector<int>{0, 1});
    auto h = verify_hyperplanes(cc, ws);
    CHECK(h.all_separate);
    CHECK(h.hyperplanes == 2);
    CHECK(link_flag_check(cc).cliques == 0);
  }
  SUBCASE("bad input") {
    FiniteWallspace ws;
    ws.points = 2;
    ws.sides = {{1, 1}};
    CHECK_THROWS_AS(build_dual(ws), InputError);
    ws.sides = {{-1, 1}};
    ws.edges = {{0, 1}};
    CHECK_THROWS_AS(build_dual(ws), InputError);
    CHECK_THROWS_AS(build_dual(crossing_wallspace(5), {4, 4}), ResourceError);
  }
}

TEST_CASE("median check") {
  CHECK(is_median(std::vector<std::vector<int>>{{1, 2}, {0, 2}, {0, 1}}).ok == false);
  auto tri = is_median(std::vector<std::vector<int>>{{1, 2}, {0, 2}, {0, 1}});
  CHECK(tri.bad_triple == std::vector<int>{0, 1, 2});
  CHECK(tri.medians == 0);
  // K_{2,3} has two medians for its three-vertex side
  auto k23 = is_median(std::vector<std::vector<int>>{{2, 3, 4}, {2, 3, 4}, {0, 1}, {0, 1}, {0, 1}});
  CHECK_FALSE(k23.ok);
  CHECK(k23.medians == 2);
  CHECK(is_median(std::vector<std::vector<int>>{{1}, {0, 2}, {1}}).ok);
  CHECK_FALSE(is_median(std::vector<std::vector<int>>{{}, {}}).ok);
}

TEST_CASE("flag condition") {
  auto cc = build_dual(crossing_wallspace(3));
  auto ok = link_flag_check(cc);
  CHECK(ok.ok);
  CHECK(ok.cliques == 8);  // the link of each corner is a single triangle
  auto broken = cc;
  broken.cubes.erase(std::remove_if(broken.cubes.begin(), broken.cubes.end(),
                                    [](Cube const& c) { return c.walls.size() == 3; }),
                     broken.cubes.end());
  auto bad = link_flag_check(broken);
  CHECK_FALSE(bad.ok);
  CHECK(bad.detail.find("span no cube") != std::string::npos);
}

TEST_CASE("trees come back") {
  std::mt19937 rng(20260401);
  for (int trial = 0; trial < 40; ++trial) {
    int  n = 2 + static_cast<int>(rng() % 12);
    auto edges = random_tree(n, rng);
    auto ws = tree_wallspace(n, edges);
    auto cc = build_dual(ws);
    REQUIRE(cc.vertices.size() == static_cast<size_t>(n));
    CHECK(cc.edges.size() == static_cast<size_t>(n - 1));
    CHECK(cc.cubes.empty());
    std::vector<std::vector<int>> adj(n);
    for (auto const& [a, b] : edges) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    CHECK(ahu(cc.adjacency()) == ahu(adj));
    // the principal vertices are the isomorphism
    for (auto const& [a, b] : edges) {
      CHECK(flip_distance(cc, cc.principal[a], cc.principal[b]) == 1);
    }
    CHECK(is_median(cc).ok);
  }
  CHECK_THROWS_AS(tree_wallspace(3, {{0, 1}, {1, 0}}), InputError);
}

TEST_CASE("random plane wallspaces") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    auto ws = random_plane_wallspace(2 + trial % 6, rng);
    auto cc = build_dual(ws);
    std::set<std::vector<int>> got(cc.vertices.begin(), cc.vertices.end());
    CHECK(got == brute_orientations(ws));
    CHECK(is_median(cc).ok);
    CHECK(link_flag_check(cc).ok);
    CHECK(verify_hyperplanes(cc, ws).ok);
    for (int i = 0; i < 10; ++i) {
      int u = static_cast<int>(rng() % ws.points), v = static_cast<int>(rng() % ws.points);
      int sep = 0;
      for (auto const& s : ws.sides) {
        sep += s[u] != s[v];
      }
      CHECK(flip_distance(cc, cc.principal[u], cc.principal[v]) == sep);
    }
  }
}

TEST_CASE("dual of window walls") {
  auto       tri = load_fixture("tribonacci.json");
  auto&      m = tri.map;
  WindowSpec spec;
  spec.lo = 0;
  spec.hi = 4;
  spec.center = tri.tree->base_vertex(0);
  auto s = search_wall_system(m, 2, Rational(1, 4), spec, 2, 10, 6, 200);
  REQUIRE(s.found);
  auto                          w = assemble_walls(m, s.busts, spec);
  std::vector<std::vector<int>> walls;
  for (int e = 0; e < m.num_edges(); ++e) {
    walls.push_back({w.component_of_bust(TreeEdge{NormalForm(), e}, 2)});
  }
  auto ws = window_wallspace(w, walls);
  CHECK(ws.num_walls() >= 1);
  auto cc = build_dual(ws);
  CHECK(is_median(cc).ok);
  CHECK(link_flag_check(cc).ok);
  CHECK(verify_hyperplanes(cc, ws).ok);
  auto j = nlohmann::json::parse(dual_to_json(cc, ws));
  CHECK(j["vertices"].size() == cc.vertices.size());
  CHECK(dual_to_dot(cc).rfind("graph dual", 0) == 0);
}
