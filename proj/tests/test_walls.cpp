#include <json.hpp>

#include "doctest.h"
#include "flowcube/errors.hpp"
#include "flowcube/io.hpp"
#include "flowcube/walls.hpp"

using namespace flowcube;

namespace {
  TreeEdge base_edge(int e) { return TreeEdge{NormalForm(), e}; }

  WindowSpec window(BassSerreTree const& T, int hi, int radius = 2) {
    WindowSpec spec;
    spec.lo = 0;
    spec.hi = hi;
    spec.radius = radius;
    spec.angle_cap = 2;
    spec.center = T.base_vertex(0);
    return spec;
  }

  PeriodicOrbit orbit_at(GraphMap const& m, int e, Rational const& t) {
    for (auto const& o : find_periodic_points(m, e, Rational(1), 10).orbits) {
      if (!o.point.on_vertex && o.offset == t) {
        return o;
      }
    }
    FAIL("no periodic point at ", to_string(t));
    return {};
  }

  int bust_component(WallComplex const& w, int e, int sign, int level) {
    auto it = w.node_index.find(NodeKey{NodeKind::primary_end, level, base_edge(e), {}, -1, sign});
    REQUIRE(it != w.node_index.end());
    return w.component_of_node[it->second];
  }

  // Centered busts on cyclic3 whose wall runs between the lines through the
  // second and third base vertices.
  WallComplex cyclic3_wall(Problem const& P) {
    auto const&                  m = P.map;
    std::map<int, PeriodicOrbit> tg{{0, orbit_at(m, 0, Rational(2, 5))},
                                    {1, orbit_at(m, 1, Rational(1, 4))},
                                    {2, orbit_at(m, 2, Rational(3, 5))}};
    REQUIRE(admissible_targets(m, 1, tg));
    auto bs = search_busts(m, tg, Rational(1, 4), 1, 6, 12, BustPlacement::centered);
    REQUIRE(bs.found);
    return assemble_walls(m, bs.system, window(*P.tree, 4));
  }
}  // namespace

TEST_CASE("bust conditions") {
  auto  fib = load_fixture("fibonacci.json");
  auto& m = fib.map;

  SUBCASE("empty system is vacuous") {
    auto rep = verify_bust_conditions(m, make_bust_system(m, 1, {}), 6);
    CHECK(rep.ok);
    CHECK(rep.vacuous);
  }
  SUBCASE("primary meeting its own preimage") {
    // f(a) = ab, so [1/10, 2/5] on a pulls back to [1/20, 1/5] on a
    auto sys = make_bust_system(m, 1, {{0, {Rational(1, 10), Rational(2, 5)}}});
    bool found = false;
    for (auto const& s : sys.on_edge(0)) {
      if (s.target == base_edge(0)) {
        CHECK(s.span == Interval{Rational(1, 20), Rational(1, 5)});
        found = true;
      }
    }
    CHECK(found);
    auto rep = verify_bust_conditions(m, sys, 6);
    REQUIRE_FALSE(rep.ok);
    CHECK(rep.violations.front().condition == 1);
    CHECK(rep.violations.front().detail.find("[1/10, 1/5]") != std::string::npos);
  }
  SUBCASE("bust outside the open edge") {
    CHECK_THROWS_AS(make_bust_system(m, 1, {{0, {Rational(0), Rational(1, 2)}}}), InputError);
  }
  SUBCASE("single target puts an endpoint on it") {
    auto cands = target_candidates(m, 8);
    REQUIRE_FALSE(cands[0].empty());
    auto o = cands[0].front();
    auto bs = search_busts(m, {{0, o}}, Rational(1, 4), 2, 6);
    REQUIRE(bs.found);
    auto const& d = bs.system.primary.at(0);
    CHECK((d.lo == o.offset || d.hi == o.offset));
    CHECK(0 < d.lo);
    CHECK(d.hi < 1);
  }
  SUBCASE("large eps still lands inside the edge") {
    auto tg = choose_targets(m, 1, 8);
    auto bs = search_busts(m, tg, Rational(4), 1, 6);
    REQUIRE(bs.found);
    for (auto const& [e, d] : bs.system.primary) {
      CHECK(0 < d.lo);
      CHECK(d.hi < 1);
    }
  }
}

TEST_CASE("secondary busts map onto their targets") {
  for (auto name : {"fibonacci.json", "tribonacci.json", "cyclic3.json"}) {
    auto  P = load_fixture(name);
    auto& m = P.map;
    auto& T = *P.tree;
    for (int L : {1, 2}) {
      auto bs = search_busts(m, choose_targets(m, L, 10), Rational(1, 4), L, 6);
      REQUIRE(bs.found);
      auto const& b = bs.system;
      for (auto const& s : b.secondary) {
        auto const& d = b.primary.at(s.target.edge);
        auto        lo = map_point(m, T.point(base_edge(s.edge), s.span.lo), L);
        auto        hi = map_point(m, T.point(base_edge(s.edge), s.span.hi), L);
        CHECK(lo == T.point(s.target, s.dir > 0 ? d.lo : d.hi));
        CHECK(hi == T.point(s.target, s.dir > 0 ? d.hi : d.lo));
      }
    }
  }
}

TEST_CASE("target choice") {
  auto  tri = load_fixture("tribonacci.json");
  auto& m = tri.map;
  auto  cands = target_candidates(m, 10);
  for (auto const& c : cands) {
    REQUIRE_FALSE(c.empty());
  }
  // one periodic orbit seen on two edges is rejected
  auto const& o = cands[0].front();
  auto        q = map_point(m, o.point);
  for (int j = 1; j < o.period && q.edge.edge == 0; ++j) {
    q = map_point(m, q);
  }
  if (q.edge.edge != 0) {
    PeriodicOrbit other = o;
    other.point = tri.tree->point(base_edge(q.edge.edge), q.t);
    other.offset = q.t;
    CHECK_FALSE(admissible_targets(m, 2, {{0, o}, {q.edge.edge, other}}));
  }
  auto tg = choose_targets(m, 2, 10);
  CHECK(tg.size() == 3);
  CHECK(admissible_targets(m, 2, tg));
}

TEST_CASE("assembly without busts") {
  auto  fib = load_fixture("fibonacci.json");
  auto  w = assemble_walls(fib.map, make_bust_system(fib.map, 1, {}), window(*fib.tree, 3));
  for (auto const& pc : w.pieces) {
    CHECK((pc.key.kind == PieceKind::arc || pc.key.kind == PieceKind::star));
  }
  // each fractional tree is a single component
  CHECK(w.components.size() == 3);
}

TEST_CASE("assembly geometry") {
  auto  fib = load_fixture("fibonacci.json");
  auto& m = fib.map;
  auto& T = *fib.tree;
  int   L = 2;
  auto  bs = search_busts(m, choose_targets(m, L, 8), Rational(1, 4), L, 6);
  REQUIRE(bs.found);
  auto w = assemble_walls(m, bs.system, window(T, 4, 3));
  CHECK(w.window.scale == L);

  SUBCASE("level endpoints land on primary ends") {
    for (auto const& pc : w.pieces) {
      if (pc.key.kind == PieceKind::level) {
        auto const& n = w.nodes[pc.nodes[1]];
        CHECK(n.kind == NodeKind::primary_end);
        CHECK(n.level == pc.key.level + 1);
      }
      if (pc.key.kind == PieceKind::slope) {
        auto const& a = w.nodes[pc.nodes[0]];
        auto const& b = w.nodes[pc.nodes[1]];
        CHECK(a.kind == NodeKind::primary_end);
        CHECK(b.kind == NodeKind::copy_end);
        CHECK(a.sign == -b.sign);
      }
    }
  }
  SUBCASE("level count matches the backward flow tree") {
    for (auto const& [e, d] : w.busts.primary) {
      for (int i = 1; i < 3; ++i) {
        for (int sign : {-1, 1}) {
          auto x = FlowPoint{L * i, T.point(base_edge(e), sign < 0 ? d.lo : d.hi)};
          auto bt = backward_flow_tree(m, x, L);
          int  expected = 0;
          for (int leaf : bt.leaves) {
            auto const& p = bt.nodes[leaf].point.point;
            expected += !p.on_vertex && w.window.at(i - 1).contains(p.edge);
          }
          int target = w.node_index.at(NodeKey{NodeKind::primary_end, i, base_edge(e), {}, -1, sign});
          int count = 0;
          for (auto const& pc : w.pieces) {
            count += pc.key.kind == PieceKind::level && pc.nodes[1] == target;
          }
          CHECK(count == expected);
          CHECK(expected > 0);
        }
      }
    }
  }
  SUBCASE("folding") {
    int  c = bust_component(w, 0, -1, 2);
    auto f = fold_wall(w, c);
    CHECK(f.ok);
    for (auto const& fl : f.levels) {
      CHECK(fl.chain.size() == static_cast<size_t>(L + 1));
      CHECK(fl.endpoints_ok);
      CHECK(fl.square_ok);
    }
    CHECK(f.unit_segments <= f.unfolded_segments);
    CHECK(f.unfolded_segments == L * static_cast<int>(f.levels.size()));
  }
  SUBCASE("folding is trivial at L = 1") {
    auto b1 = search_busts(m, choose_targets(m, 1, 8), Rational(1, 4), 1, 6);
    REQUIRE(b1.found);
    auto w1 = assemble_walls(m, b1.system, window(T, 3));
    auto f = fold_wall(w1, bust_component(w1, 0, -1, 1));
    CHECK(f.ok);
    CHECK(f.unit_segments == f.unfolded_segments);
    CHECK(f.unfolded_segments == static_cast<int>(f.levels.size()));
  }
  SUBCASE("window with hi <= lo") {
    auto spec = window(T, 0);
    CHECK_THROWS_AS(assemble_walls(m, bs.system, spec), InputError);
  }
}

TEST_CASE("separating wall on tribonacci") {
  auto       tri = load_fixture("tribonacci.json");
  auto&      m = tri.map;
  WindowSpec spec = window(*tri.tree, 4);
  auto       s = search_wall_system(m, 2, Rational(1, 4), spec, 2, 10, 6, 200);
  REQUIRE(s.found);
  auto w = assemble_walls(m, s.busts, spec);
  for (int e = 0; e < m.num_edges(); ++e) {
    int  c = w.component_of_bust(base_edge(e), 2);
    auto sep = check_separation(w, {c});
    CHECK(sep.verdict == "wall");
    CHECK(sep.components == 2);
    CHECK(sep.same_side_busts);
    CHECK(approximate_wall(w, {c}).is_tree);
    CHECK(fold_wall(w, c).ok);
  }
}

TEST_CASE("non-embedded wall") {
  // all default targets at L = 2 share images across levels, so the wall
  // through the middle bust crosses itself
  auto  tri = load_fixture("tribonacci.json");
  auto& m = tri.map;
  auto  tg = choose_targets(m, 2, 10);
  auto  bs = search_busts(m, tg, Rational(1, 4), 2, 6);
  REQUIRE(bs.found);
  auto w = assemble_walls(m, bs.system, window(*tri.tree, 4));
  bool any_cycle = false;
  for (int e = 0; e < m.num_edges(); ++e) {
    auto a = approximate_wall(w, {w.component_of_bust(base_edge(e), 2)});
    any_cycle = any_cycle || !a.is_tree;
    if (!a.is_tree) {
      CHECK(a.cycles > 0);
      CHECK(check_separation(w, {w.component_of_bust(base_edge(e), 2)}).verdict != "wall");
    }
  }
  CHECK(any_cycle);
}

TEST_CASE("saturation and cuts") {
  auto  P = load_fixture("cyclic3.json");
  auto& T = *P.tree;
  auto  w = cyclic3_wall(P);
  int   c = bust_component(w, 0, 1, 2);
  CHECK(check_separation(w, {c}).verdict == "wall");

  auto sat = saturate_wall(w, c, 2);
  CHECK(sat.components.front() == c);
  CHECK(sat.connected);
  auto aud = audit_saturation(w, sat);
  CHECK(aud.ok);
  auto again = saturate_wall(w, sat);
  CHECK(again.components == sat.components);
  CHECK(again.lines.size() == sat.lines.size());
  CHECK_THROWS_AS(saturate_wall(w, c, 0), InputError);

  auto a = window_line(w, T.base_vertex(1), 2);
  auto b = window_line(w, T.base_vertex(2), 2);
  auto pair = check_cut(w, sat, a, b);
  CHECK(pair.verdict == "separated");
  CHECK(pair.side_a == -pair.side_b);
  CHECK(check_cut(w, sat, a).verdict == "same side");
  CHECK(check_cut(w, sat, b).verdict == "same side");
  CHECK(check_cut(w, sat, a, a).verdict == "same side");
}

TEST_CASE("stabilizers, overlap and export") {
  auto P = load_fixture("cyclic3.json");
  auto w = cyclic3_wall(P);
  int  c = bust_component(w, 0, 1, 2);

  auto stab = wall_stabilizer_search(w, {c}, 1, 1);
  bool has_identity = false;
  for (auto const& x : stab) {
    has_identity = has_identity || (x.k == 0 && x.g.is_identity());
  }
  CHECK(has_identity);

  auto ov = ladder_overlap_diameter(w, {c}, 1);
  CHECK(ov.B >= 0);

  auto j = nlohmann::json::parse(wall_to_json(w, {c}));
  REQUIRE(j["components"].size() == 1);
  CHECK(j["components"][0]["pieces"].size() == w.components[c].pieces.size());
  CHECK(wall_to_dot(w, {c}).rfind("graph", 0) == 0);
}

TEST_CASE("cut search") {
  auto  P = load_fixture("cyclic3.json");
  auto& T = *P.tree;
  auto  spec = window(T, 4);
  auto  s = search_cut_wall(P.map, 1, Rational(1, 4), spec, 2, T.base_vertex(1), T.base_vertex(2), 2, 6, 6, 200);
  REQUIRE(s.found);
  auto w = assemble_walls(P.map, s.busts, spec);
  auto it = w.node_index.find(NodeKey{NodeKind::primary_end, 2, base_edge(s.edge), {}, -1, s.sign});
  REQUIRE(it != w.node_index.end());
  auto sat = saturate_wall(w, w.component_of_node[it->second], 2);
  auto a = window_line(w, T.base_vertex(1), 2), b = window_line(w, T.base_vertex(2), 2);
  CHECK(check_cut(w, sat, a, b).verdict == "separated");
  CHECK(check_cut(w, sat, a).verdict == "same side");
  CHECK(check_cut(w, sat, b).verdict == "same side");
}
