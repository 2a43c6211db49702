#include <fstream>
#include <sstream>
#include <cmath>
#include <random>

#include "doctest.h"
#include "flowcube/errors.hpp"
#include "flowcube/io.hpp"
#include "oracles.hpp"

using namespace flowcube;

namespace {
  GraphMap identity_map(Problem const& p) {
    GraphMap m = p.map;
    auto const& G = *p.group;
    std::vector<NormalForm> gens;
    for (int g = 0; g < G.num_generators(); ++g) {
      gens.push_back(G.generator(g));
    }
    m.phi = Automorphism(p.group, gens, gens);
    for (int e = 0; e < p.graph->num_edges(); ++e) {
      m.edge_images[e] = {{TreeEdge{NormalForm(), e}, 1}};
    }
    for (int v = 0; v < p.graph->num_vertices(); ++v) {
      m.vertex_images[v] = {NormalForm(), v};
    }
    return m;
  }

  std::string read_fixture(std::string const& name) {
    std::ifstream     in(std::string(FLOWCUBE_FIXTURE_DIR) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
}  // namespace

TEST_CASE("fixtures load and validate") {
  for (auto name : {"fibonacci.json", "tribonacci.json", "cyclic3.json"}) {
    auto p = load_fixture(name);
    CHECK(validate_marked_graph(*p.graph).ok);
    CHECK(validate_graph_map(p.map).ok);
    CHECK(p.warnings.empty());
    CHECK(validate_graph_map(identity_map(p)).ok);
    // serialisation round trip
    auto again = parse_problem(dump_problem(p));
    CHECK(dump_problem(again) == dump_problem(p));
  }
}

TEST_CASE("marked graph validation") {
  auto p = load_fixture("cyclic3.json");
  auto r = validate_marked_graph(*p.graph);
  CHECK(r.ok);
  CHECK(p.graph->num_edges() - p.graph->num_vertices() + 1 == 0);

  auto G = oracle::free_group({"a", "b"});
  // a free vertex of valence 2
  MarkedGraph bad(G, {{"u", -1}, {"w", -1}},
                  {{"e1", 0, 1, NormalForm()}, {"e2", 0, 0, G->parse("a")}, {"e3", 1, 1, G->parse("b")}});
  auto br = validate_marked_graph(bad);
  CHECK(br.ok);  // valence 3 at both ends
  MarkedGraph bad2(G, {{"u", -1}, {"w", -1}, {"x", -1}},
                   {{"e1", 0, 1, NormalForm()}, {"e2", 1, 2, NormalForm()}, {"e3", 0, 0, G->parse("a")},
                    {"e4", 2, 2, G->parse("b")}});
  auto br2 = validate_marked_graph(bad2);
  CHECK_FALSE(br2.ok);
  bool valence = false;
  for (auto const& why : br2.problems) {
    valence = valence || why.find("valence 2") != std::string::npos;
  }
  CHECK(valence);
}

TEST_CASE("graph map validation catches a wrong automorphism") {
  auto text = read_fixture("fibonacci.json");
  auto pos = text.find("\"a\": \"a b\"");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 10, "\"a\": \"b a\"");
  auto inv = text.find("\"b\": \"b^-1 a\"");
  text.replace(inv, 14, "\"b\": \"a b^-1\"");
  CHECK_THROWS_AS(parse_problem(text), InputError);

  // the same map checked directly names generator a
  auto p = load_fixture("fibonacci.json");
  auto G = p.group;
  auto m = p.map;
  m.phi = Automorphism(G, {G->parse("b a"), G->parse("a")}, {G->parse("b"), G->parse("a b^-1")});
  auto r = validate_graph_map(m);
  CHECK_FALSE(r.ok);
  REQUIRE(r.mismatched_generators.size() == 1);
  CHECK(r.mismatched_generators[0] == 0);
}

TEST_CASE("malformed input") {
  try {
    parse_problem("{\n  \"free_rank\": 2,\n  oops\n}");
    FAIL("expected a parse error");
  } catch (InputError const& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  auto text = read_fixture("fibonacci.json");
  text.replace(text.find("\"free_rank\": 2"), 14, "\"free_rank\": 1");
  CHECK_THROWS_AS(parse_problem(text), InputError);
}

TEST_CASE("standing hypotheses warning") {
  auto text = R"({
    "factors": [{"id": "a", "rank": 1}],
    "free_rank": 1, "free_generators": ["x"],
    "automorphism": {"images": {"a": "a", "x": "x"}, "inverse_images": {"a": "a", "x": "x"}},
    "graph": {"vertices": [{"id": "A", "mark": "a"}, {"id": "o"}],
              "edges": [{"id": "e", "from": "o", "to": "A"}, {"id": "l", "from": "o", "to": "o"}]},
    "map": {"edges": {"e": [{"edge": "e"}], "l": [{"edge": "l"}]},
            "vertices": {"A": {"vertex": "A"}, "o": {"vertex": "o"}}}})";
  auto p = parse_problem(text);
  CHECK(p.warnings.size() == 1);
}

TEST_CASE("illegal turns") {
  for (auto name : {"fibonacci.json", "cyclic3.json"}) {
    auto p = load_fixture(name);
    auto t = compute_illegal_turns(identity_map(p));
    for (auto const& row : t.at) {
      for (auto const& it : row) {
        CHECK(it.rep_a == it.rep_b);
        CHECK(it.delta.is_identity());
      }
    }
  }

  // Fibonacci: compare all 16 ordered germ pairs at the rose vertex with a
  // direct first-edge comparison.
  auto  fib = load_fixture("fibonacci.json");
  auto& T = *fib.tree;
  auto  table = compute_illegal_turns(fib.map);
  auto  v = T.base_vertex(0);
  int   illegal_proper = 0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      auto ga = T.germ_at(v, {NormalForm(), a});
      auto gb = T.germ_at(v, {NormalForm(), b});
      auto fa = map_edge(fib.map, ga.edge);
      auto fb = map_edge(fib.map, gb.edge);
      auto first_a = ga.from_end ? T.start_germ(fa.steps.front()) : T.end_germ(fa.steps.back());
      auto first_b = gb.from_end ? T.start_germ(fb.steps.front()) : T.end_germ(fb.steps.back());
      bool illegal = first_a == first_b;
      CHECK(table.is_illegal(0, a, b, NormalForm()) == illegal);
      illegal_proper += illegal && a != b;
    }
  }
  // the only proper illegal turn is {a out, b out}
  CHECK(illegal_proper == 2);
  CHECK(table.is_illegal(0, 0, 1, NormalForm()));

  // two edges with the same image first edge
  auto tri = load_fixture("tribonacci.json");
  auto const& TG = *tri.group;
  CHECK_FALSE(is_legal_turn(tri.map, Germ{TreeEdge{TG.parse("a^-1"), 0}, false}, Germ{TreeEdge{TG.parse("c^-1"), 2}, false}));
}

TEST_CASE("train tracks") {
  for (auto name : {"fibonacci.json", "tribonacci.json", "cyclic3.json"}) {
    auto p = load_fixture(name);
    auto r = is_train_track(p.map, 8);
    CHECK_MESSAGE(r.ok, r.failure);
    CHECK(is_train_track(identity_map(p), 4).ok);
  }
  // an image with a backtrack: a -> a b b^-1
  auto fib = load_fixture("fibonacci.json");
  auto m = fib.map;
  auto G = fib.group;
  m.edge_images[0] = {{TreeEdge{NormalForm(), 0}, 1}, {TreeEdge{G->parse("a"), 1}, 1}, {TreeEdge{G->parse("a"), 1}, -1}};
  m.phi = Automorphism(G, {G->parse("a"), G->parse("a")}, {G->parse("a"), G->parse("a")});
  auto r = is_train_track(m, 3);
  CHECK_FALSE(r.ok);
  REQUIRE(r.has_turn);
  CHECK(r.turn_a == r.turn_b);
}

TEST_CASE("transition matrices") {
  auto fib = load_fixture("fibonacci.json");
  CHECK(transition_matrix(fib.map) == IntMatrix{{1, 1}, {1, 0}});
  auto tri = load_fixture("tribonacci.json");
  CHECK(transition_matrix(tri.map) == IntMatrix{{0, 1, 0}, {0, 0, 1}, {1, 1, 0}});
  CHECK(transition_matrix(identity_map(tri)) == IntMatrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  for (auto name : {"fibonacci.json", "tribonacci.json", "cyclic3.json"}) {
    auto p = load_fixture(name);
    auto M = transition_matrix(p.map);
    for (int n = 1; n <= 4; ++n) {
      auto pn = power(p.map, n);
      CHECK(validate_graph_map(pn).ok);
      CHECK(transition_matrix(pn) == matrix_power(M, n));
      for (int e = 0; e < p.graph->num_edges(); ++e) {
        long long row = 0;
        auto      Mn = transition_matrix(pn);
        for (auto x : Mn[e]) {
          row += x;
        }
        CHECK(row == static_cast<long long>(pn.edge_images[e].size()));
      }
    }
  }
}

TEST_CASE("stretch factors") {
  double golden = oracle::bisect_root([](double x) { return x * x - x - 1; }, 1, 2);
  double plastic = oracle::bisect_root([](double x) { return x * x * x - x - 1; }, 1, 2);
  auto   s2 = stretch_factor({{1, 1}, {1, 0}}, 1e-12);
  CHECK(std::abs(s2.value - golden) / golden <= 1e-9);
  CHECK(s2.lower <= golden + 1e-12);
  CHECK(s2.upper >= golden - 1e-12);
  auto s3 = stretch_factor({{0, 1, 0}, {0, 0, 1}, {1, 1, 0}}, 1e-12);
  CHECK(std::abs(s3.value - plastic) / plastic <= 1e-9);
  CHECK(std::abs(stretch_factor({{1, 0}, {0, 1}}, 1e-12).value - 1.0) <= 1e-12);
  CHECK_THROWS_AS(stretch_factor({{0, 0}, {0, 0}}, 1e-9), InputError);
  CHECK_THROWS_AS(stretch_factor({{1, 1}, {1, 0}}, 1e-30, 5), NumericalError);

  auto cyc = load_fixture("cyclic3.json");
  auto sc = stretch_factor(transition_matrix(cyc.map), 1e-12);
  CHECK(std::abs(sc.value - golden) / golden <= 1e-9);

  // row sum bounds for irreducible matrices
  std::mt19937 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    int       n = 2 + static_cast<int>(rng() % 3);
    IntMatrix M(n, std::vector<long long>(n));
    for (auto& row : M) {
      for (auto& x : row) {
        x = 1 + rng() % 3;
      }
    }
    long long lo = 1 << 30, hi = 0;
    for (auto const& row : M) {
      long long s = 0;
      for (auto x : row) {
        s += x;
      }
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    auto s = stretch_factor(M, 1e-10);
    CHECK(s.value >= lo - 1e-6);
    CHECK(s.value <= hi + 1e-6);
  }
}

TEST_CASE("irreducibility") {
  auto fib = load_fixture("fibonacci.json");
  auto r = check_irreducible(fib.map, 4);
  CHECK(r.irreducible);
  CHECK(r.primitive);
  auto cyc = load_fixture("cyclic3.json");
  CHECK(check_irreducible(cyc.map, 4).irreducible);

  // a -> a, b -> b a fixes the loop a
  auto m = fib.map;
  auto G = fib.group;
  m.phi = Automorphism(G, {G->parse("a"), G->parse("b a")}, {G->parse("a"), G->parse("b a^-1")});
  m.edge_images[0] = {{TreeEdge{NormalForm(), 0}, 1}};
  m.edge_images[1] = {{TreeEdge{NormalForm(), 1}, 1}, {TreeEdge{G->parse("b"), 0}, 1}};
  REQUIRE(validate_graph_map(m).ok);
  auto rr = check_irreducible(m, 3);
  CHECK_FALSE(rr.irreducible);
  CHECK(rr.witness == std::vector<int>{0});
  CHECK_FALSE(rr.primitive);
}

TEST_CASE("pieces agree with iterated point maps") {
  std::mt19937 rng(32);
  for (auto name : {"fibonacci.json", "tribonacci.json", "cyclic3.json"}) {
    auto p = load_fixture(name);
    for (int e = 0; e < p.graph->num_edges(); ++e) {
      for (int n = 0; n <= 5; ++n) {
        auto pieces = iterate_pieces(p.map, e, n);
        CHECK(pieces.front().lo == 0);
        CHECK(pieces.back().hi == 1);
        for (int trial = 0; trial < 10; ++trial) {
          Rational t(1 + static_cast<long>(rng() % 997), 998);
          t.canonicalize();
          auto direct = map_point(p.map, p.tree->point(TreeEdge{NormalForm(), e}, t), n);
          for (auto const& pc : pieces) {
            if (pc.lo <= t && t <= pc.hi) {
              CHECK(p.tree->point(pc.edge, piece_offset(pc, t)) == direct);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("map_point on the Fibonacci fixture") {
  auto fib = load_fixture("fibonacci.json");
  auto x = fib.tree->point(TreeEdge{NormalForm(), 0}, make_rational(1, 2));
  auto y = map_point(fib.map, x);
  REQUIRE(y.on_vertex);
  CHECK(y.vertex == fib.tree->vertex(fib.group->parse("a"), 0));
}
