#include <deque>
#include <random>

#include "doctest.h"
#include "flowcube/errors.hpp"
#include "flowcube/io.hpp"
#include "oracles.hpp"

using namespace flowcube;

namespace {
  // Distances by breadth-first search inside a materialized ball.
  int ball_distance(BassSerreTree const& T, TreeBall const& b, TreeVertex const& u, TreeVertex const& v) {
    std::map<TreeVertex, std::vector<TreeVertex>> adj;
    for (auto const& e : b.edges) {
      adj[T.source(e)].push_back(T.target(e));
      adj[T.target(e)].push_back(T.source(e));
    }
    std::map<TreeVertex, int> dist{{u, 0}};
    std::deque<TreeVertex>    q{u};
    while (!q.empty()) {
      auto x = q.front();
      q.pop_front();
      if (x == v) {
        return dist[x];
      }
      for (auto const& y : adj[x]) {
        if (!dist.count(y)) {
          dist[y] = dist[x] + 1;
          q.push_back(y);
        }
      }
    }
    return -1;
  }

  NormalForm random_word(FreeProduct const& G, std::mt19937& rng, int max_len) {
    return G.normalize(oracle::random_raw(rng, G.num_generators(), max_len));
  }
}  // namespace

TEST_CASE("ball sizes") {
  auto  fib = load_fixture("fibonacci.json");
  auto& T = *fib.tree;
  auto  b0 = T.expand_ball(T.base_vertex(0), 0, 1);
  CHECK(b0.vertices.size() == 1);
  CHECK(b0.edges.empty());
  auto b1 = T.expand_ball(T.base_vertex(0), 1, 1);
  // one neighbour per directed germ: 2 * (number of edges)
  CHECK(b1.vertices.size() == 1 + 2 * fib.graph->num_edges());

  auto  cyc = load_fixture("cyclic3.json");
  auto& C = *cyc.tree;
  int   A = cyc.graph->vertex_index("A");
  auto  ba = C.expand_ball(C.base_vertex(A), 1, 2);
  REQUIRE(ba.vertices.size() == 6);
  std::set<NormalForm> decorations;
  for (auto const& e : ba.edges) {
    decorations.insert(C.decorate(C.base_vertex(A), Germ{e, false}).h);
  }
  auto const& G = *cyc.group;
  std::set<NormalForm> expected{G.parse("1"), G.parse("a"), G.parse("a^-1"), G.parse("a^2"), G.parse("a^-2")};
  CHECK(decorations == expected);
  CHECK_THROWS_AS(C.expand_ball(C.base_vertex(A), -1, 2), InputError);
}

TEST_CASE("balls are trees and deterministic") {
  for (auto name : {"fibonacci.json", "tribonacci.json", "cyclic3.json"}) {
    auto  p = load_fixture(name);
    auto& T = *p.tree;
    for (int v = 0; v < p.graph->num_vertices(); ++v) {
      auto b = T.expand_ball(T.base_vertex(v), 4, 2);
      CHECK(b.edges.size() + 1 == b.vertices.size());
      auto again = T.expand_ball(T.base_vertex(v), 4, 2);
      CHECK(again.vertices == b.vertices);
      CHECK(again.edges == b.edges);
    }
  }
}

TEST_CASE("action laws") {
  std::mt19937 rng(21);
  for (auto name : {"fibonacci.json", "cyclic3.json"}) {
    auto        p = load_fixture(name);
    auto&       T = *p.tree;
    auto const& G = *p.group;
    auto        ball = T.expand_ball(T.base_vertex(0), 3, 2);
    for (int trial = 0; trial < 100; ++trial) {
      auto g = random_word(G, rng, 6);
      auto h = random_word(G, rng, 6);
      auto const& v = ball.vertices[rng() % ball.vertices.size()];
      auto const& e = ball.edges[rng() % ball.edges.size()];
      CHECK(T.act(G.identity(), v) == v);
      CHECK(T.act(G.multiply(g, h), v) == T.act(g, T.act(h, v)));
      CHECK(T.act(g, T.act(G.invert(g), v)) == v);
      CHECK(T.act(g, T.act(G.invert(g), e)) == e);
      // edge stabilisers are trivial
      if (T.act(g, e) == e) {
        CHECK(g.is_identity());
      }
      auto pt = T.point(e, make_rational(1, 3));
      CHECK(T.act(g, T.act(G.invert(g), pt)) == pt);
      CHECK(T.source(T.act(g, e)) == T.act(g, T.source(e)));
      CHECK(T.target(T.act(g, e)) == T.act(g, T.target(e)));
    }
  }
}

TEST_CASE("geodesics") {
  auto        fib = load_fixture("fibonacci.json");
  auto&       T = *fib.tree;
  auto const& G = *fib.group;
  auto        u = T.base_vertex(0);
  auto        v = T.vertex(G.parse("a b"), 0);
  auto        p = T.geodesic(u, v);
  REQUIRE(p.length() == 2);
  CHECK(T.step_end(p.steps[0]) == T.vertex(G.parse("a"), 0));
  CHECK(T.geodesic(u, u).steps.empty());

  std::mt19937 rng(22);
  for (auto name : {"fibonacci.json", "tribonacci.json", "cyclic3.json"}) {
    auto  pr = load_fixture(name);
    auto& S = *pr.tree;
    auto  ball = S.expand_ball(S.base_vertex(0), 5, 3);
    for (int trial = 0; trial < 60; ++trial) {
      auto const& x = ball.vertices[rng() % ball.vertices.size()];
      auto const& y = ball.vertices[rng() % ball.vertices.size()];
      auto const& z = ball.vertices[rng() % ball.vertices.size()];
      auto        g = S.geodesic(x, y);
      CHECK(S.is_connected(g));
      CHECK(S.is_reduced(g));
      CHECK(S.end(g) == y);
      CHECK(S.distance(x, y) == S.distance(y, x));
      CHECK(S.distance(x, y) == ball_distance(S, ball, x, y));
      CHECK(S.tighten(S.concat(S.geodesic(x, z), S.geodesic(z, y))) == g);
    }
  }
}

TEST_CASE("stabilisers") {
  auto        cyc = load_fixture("cyclic3.json");
  auto&       T = *cyc.tree;
  auto const& G = *cyc.group;
  int         A = cyc.graph->vertex_index("A");
  auto        s = T.stabilizer(T.base_vertex(A));
  REQUIRE(s);
  CHECK(s->factor == 0);
  CHECK(s->conjugator.is_identity());
  auto x = T.vertex(G.parse("b"), A);
  auto sx = T.stabilizer(x);
  REQUIRE(sx);
  CHECK(sx->conjugator == G.parse("b"));
  CHECK(T.act(G.parse("b a b^-1"), x) == x);
  CHECK(T.act(G.parse("a"), x) != x);
  CHECK_FALSE(T.stabilizer(T.base_vertex(cyc.graph->vertex_index("o"))));
  // coset labels are canonical
  CHECK(T.vertex(G.parse("b a^3"), A) == x);
}

TEST_CASE("angles") {
  auto        cyc = load_fixture("cyclic3.json");
  auto&       T = *cyc.tree;
  auto const& G = *cyc.group;
  int         A = cyc.graph->vertex_index("A");
  int         o = cyc.graph->vertex_index("o");
  auto        vA = T.base_vertex(A);
  auto        d = T.germ_at(vA, {NormalForm(), 0});
  CHECK(T.angle(d, d) == 0);
  auto d3 = T.germ_at(vA, {G.parse("a^3"), 0});
  CHECK(T.angle(d, d3) == 3);
  CHECK_THROWS_AS(T.angle(d, T.germ_at(T.base_vertex(o), {NormalForm(), 0})), InputError);

  // at the free centre distinct germs make angle 1
  auto vo = T.base_vertex(o);
  CHECK(T.angle(T.germ_at(vo, {NormalForm(), 0}), T.germ_at(vo, {NormalForm(), 1})) == 1);

  // symmetry and triangle inequality
  auto germs = T.germs(vA, std::nullopt, 6);
  for (size_t i = 0; i < germs.size(); i += 3) {
    for (size_t j = 0; j < germs.size(); j += 2) {
      CHECK(T.angle(germs[i], germs[j]) == T.angle(germs[j], germs[i]));
      for (size_t k = 0; k < germs.size(); k += 5) {
        CHECK(T.angle(germs[i], germs[k]) <= T.angle(germs[i], germs[j]) + T.angle(germs[j], germs[k]));
      }
    }
  }

  // finitely many germs within a given angle; matches a direct count
  for (int cap = 1; cap <= 4; ++cap) {
    CHECK(T.germs(vA, d, cap).size() == static_cast<size_t>(2 * cap + 1));
  }
}

TEST_CASE("path angles") {
  auto        cyc = load_fixture("cyclic3.json");
  auto&       T = *cyc.tree;
  auto const& G = *cyc.group;
  int         ea = cyc.graph->edge_index("ea");
  int         o = cyc.graph->vertex_index("o");
  Path        single{T.base_vertex(o), {{TreeEdge{NormalForm(), ea}, 1}}};
  CHECK(T.path_max_angle(single) == 0);
  Path through{T.base_vertex(o), {{TreeEdge{NormalForm(), ea}, 1}, {TreeEdge{G.parse("a^3"), ea}, -1}}};
  REQUIRE(T.is_connected(through));
  CHECK(T.path_max_angle(through) == 3);

  auto  fib = load_fixture("fibonacci.json");
  auto& F = *fib.tree;
  auto  p = F.geodesic(F.base_vertex(0), F.vertex(fib.group->parse("a b a^-1 b"), 0));
  CHECK(F.path_max_angle(p) <= 1);
}

TEST_CASE("elliptic elements fix exactly one vertex") {
  auto         cyc = load_fixture("cyclic3.json");
  auto&        T = *cyc.tree;
  auto const&  G = *cyc.group;
  auto         ball = T.expand_ball(T.base_vertex(0), 6, 2);
  std::mt19937 rng(23);
  int          tested = 0;
  for (int trial = 0; trial < 200 && tested < 40; ++trial) {
    auto x = random_word(G, rng, 4);
    if (x.is_identity()) {
      continue;
    }
    int fixed = 0;
    for (auto const& v : ball.vertices) {
      fixed += T.act(x, v) == v;
    }
    auto ell = G.is_elliptic(x);
    if (ell) {
      auto fv = T.vertex(ell->conjugator, cyc.graph->vertex_of_factor(ell->factor));
      if (!ball.contains(fv)) {
        continue;
      }
      CHECK(fixed == 1);
      CHECK(T.act(x, fv) == fv);
    } else {
      CHECK(fixed == 0);
    }
    ++tested;
  }
  CHECK(tested >= 20);
}

TEST_CASE("ball exports") {
  auto  fib = load_fixture("fibonacci.json");
  auto& T = *fib.tree;
  auto  b = T.expand_ball(T.base_vertex(0), 2, 1);
  auto  dot = ball_to_dot(T, b);
  CHECK(dot.find("graph ball") == 0);
  auto js = ball_to_json(T, b);
  CHECK(js.find("\"vertices\"") != std::string::npos);
}
