#include "flowcube/traintrack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "flowcube/errors.hpp"

namespace flowcube {

  TreeVertex map_vertex(GraphMap const& m, TreeVertex const& x) {
    auto const& vi = m.vertex_images[x.base];
    return m.tree->vertex(m.group().multiply(m.phi.apply(x.label), vi.g), vi.vertex);
  }

  Path map_edge(GraphMap const& m, TreeEdge const& e) {
    Path p;
    p.start = map_vertex(m, m.tree->base_vertex(m.graph().edges()[e.edge].from));
    p.steps = m.edge_images[e.edge];
    return e.g.is_identity() ? p : m.tree->act(m.phi.apply(e.g), p);
  }

  Path map_step(GraphMap const& m, Step const& s) {
    auto p = map_edge(m, s.edge);
    return s.dir > 0 ? p : m.tree->reverse(p);
  }

  Path map_path(GraphMap const& m, Path const& p) {
    Path out;
    out.start = map_vertex(m, p.start);
    for (auto const& s : p.steps) {
      auto img = map_step(m, s);
      out.steps.insert(out.steps.end(), img.steps.begin(), img.steps.end());
    }
    return out;
  }

  TreePoint map_point(GraphMap const& m, TreePoint const& p) {
    if (p.on_vertex) {
      return TreePoint::at(map_vertex(m, p.vertex));
    }
    auto     path = map_edge(m, p.edge);
    Rational s = p.t * static_cast<long>(path.length());
    long     k = floor_long(s);
    Rational r = s - k;
    if (r == 0) {
      return TreePoint::at(m.tree->step_start(path.steps[k]));
    }
    auto const& st = path.steps[k];
    return m.tree->point(st.edge, st.dir > 0 ? r : Rational(1 - r));
  }

  TreePoint map_point(GraphMap const& m, TreePoint const& p, int n) {
    TreePoint q = p;
    for (int i = 0; i < n; ++i) {
      q = map_point(m, q);
    }
    return q;
  }

  GraphMap power(GraphMap const& m, int n) {
    if (n < 1) {
      throw InputError("power: exponent must be positive");
    }
    GraphMap out = m;
    out.phi = m.phi.power(n);
    for (int e = 0; e < m.num_edges(); ++e) {
      Path p = map_edge(m, TreeEdge{NormalForm(), e});
      for (int k = 1; k < n; ++k) {
        p = m.tree->tighten(map_path(m, p));
      }
      out.edge_images[e] = p.steps;
    }
    for (int v = 0; v < m.graph().num_vertices(); ++v) {
      auto x = m.tree->base_vertex(v);
      for (int k = 0; k < n; ++k) {
        x = map_vertex(m, x);
      }
      out.vertex_images[v] = {x.label, x.base};
    }
    return out;
  }

  GraphMapReport validate_graph_map(GraphMap const& m) {
    GraphMapReport rep;
    auto const&    g = m.graph();
    auto const&    G = m.group();
    auto const&    fs = G.system();
    auto const&    T = *m.tree;
    if (static_cast<int>(m.edge_images.size()) != g.num_edges()
        || static_cast<int>(m.vertex_images.size()) != g.num_vertices()) {
      rep.fail("map must give an image for every edge and every vertex");
      return rep;
    }
    for (auto const& vi : m.vertex_images) {
      if (vi.vertex < 0 || vi.vertex >= g.num_vertices()) {
        rep.fail("vertex image out of range");
        return rep;
      }
    }
    auto ar = verify_automorphism(m.phi);
    if (!ar.ok) {
      rep.fail("declared automorphism rejected: " + ar.failure);
    }
    for (int e = 0; e < g.num_edges(); ++e) {
      auto const& edge = g.edges()[e];
      auto const& id = edge.id;
      auto        p = map_edge(m, TreeEdge{NormalForm(), e});
      if (p.steps.empty()) {
        rep.fail("image of edge '" + id + "' is empty");
        continue;
      }
      if (!T.is_connected(p)) {
        rep.fail("image of edge '" + id + "' is not a connected path");
        continue;
      }
      if (!T.is_reduced(p)) {
        rep.fail("image of edge '" + id + "' backtracks");
      }
      auto expected = T.act(m.phi.apply(edge.label), map_vertex(m, T.base_vertex(edge.to)));
      if (T.end(p) != expected) {
        int s = g.free_generator_of_edge(e);
        if (s >= 0) {
          rep.fail("induced automorphism disagrees at generator " + fs.generator_name(s)
                   + ": image of edge '" + id + "' ends at " + G.format(T.end(p).label)
                   + " . " + g.vertices()[T.end(p).base].id + ", expected "
                   + G.format(expected.label) + " . " + g.vertices()[expected.base].id);
          rep.mismatched_generators.push_back(s);
        } else {
          rep.fail("endpoint mismatch: image of edge '" + id + "' does not end at f(" +
                   g.vertices()[edge.to].id + ")");
        }
      }
    }
    for (int v = 0; v < g.num_vertices(); ++v) {
      int f = g.vertices()[v].factor;
      if (f < 0) {
        continue;
      }
      auto fv = map_vertex(m, T.base_vertex(v));
      for (int h : fs.factor_generators(f)) {
        if (T.act(m.phi.apply(G.generator(h)), fv) != fv) {
          rep.fail("induced automorphism disagrees at generator " + fs.generator_name(h)
                   + ": phi(" + fs.generator_name(h) + ") does not fix f(" + g.vertices()[v].id + ")");
          rep.mismatched_generators.push_back(h);
        }
      }
    }
    return rep;
  }

  Germ derivative(GraphMap const& m, Germ const& d) {
    auto p = map_edge(m, d.edge);
    return d.from_end ? m.tree->start_germ(p.steps.front()) : m.tree->end_germ(p.steps.back());
  }

  bool is_legal_turn(GraphMap const& m, Germ const& a, Germ const& b) {
    if (m.tree->germ_vertex(a) != m.tree->germ_vertex(b)) {
      throw InputError("turn: germs at different vertices");
    }
    return a != b && derivative(m, a) != derivative(m, b);
  }

  bool TurnTable::is_illegal(int vertex, int rep_a, int rep_b, NormalForm const& delta) const {
    for (auto const& t : at[vertex]) {
      if (t.rep_a == rep_a && t.rep_b == rep_b && t.delta == delta) {
        return true;
      }
    }
    return false;
  }

  namespace {
    struct RepImage {
      TreeVertex w;  // f(v)
      Decoration dec;
    };

    std::vector<RepImage> rep_images(GraphMap const& m, int v) {
      auto const&           T = *m.tree;
      std::vector<RepImage> out;
      auto                  x = T.base_vertex(v);
      for (int r = 0; r < m.graph().valence(v); ++r) {
        auto d = derivative(m, T.germ_at(x, {NormalForm(), r}));
        auto w = T.germ_vertex(d);
        out.push_back({w, T.decorate(w, d)});
      }
      return out;
    }

    // delta in H_v with phi(delta) = u k u^-1, or nullopt.
    std::optional<NormalForm> solve_delta(GraphMap const& m, int v, NormalForm const& u, NormalForm const& k) {
      auto const& G = m.group();
      auto        delta = m.phi.apply(G.conjugate(u, k), -1);
      int         f = m.graph().vertices()[v].factor;
      if (f < 0 ? !delta.is_identity() : !G.in_factor(delta, f)) {
        return std::nullopt;
      }
      return delta;
    }
  }  // namespace

  TurnTable compute_illegal_turns(GraphMap const& m) {
    auto const& G = m.group();
    auto const& T = *m.tree;
    TurnTable   table;
    table.at.resize(m.graph().num_vertices());
    for (int v = 0; v < m.graph().num_vertices(); ++v) {
      auto imgs = rep_images(m, v);
      auto x = T.base_vertex(v);
      for (int a = 0; a < static_cast<int>(imgs.size()); ++a) {
        for (int b = 0; b < static_cast<int>(imgs.size()); ++b) {
          if (imgs[a].dec.rep != imgs[b].dec.rep) {
            continue;
          }
          auto u = imgs[a].w.label;
          auto delta = solve_delta(m, v, u, G.multiply(imgs[a].dec.h, G.invert(imgs[b].dec.h)));
          if (!delta) {
            continue;
          }
          // direct confirmation on the germs themselves
          if (derivative(m, T.germ_at(x, {NormalForm(), a})) != derivative(m, T.germ_at(x, {*delta, b}))) {
            throw NumericalError("illegal turn solve failed to confirm");
          }
          table.at[v].push_back({v, a, b, *delta});
        }
      }
    }
    return table;
  }

  std::string describe(BassSerreTree const& t, Germ const& d) {
    return "(" + t.group().format(d.edge.g) + ", " + t.graph().edges()[d.edge.edge].id + ", "
           + (d.from_end ? "out" : "in") + ")";
  }

  TrainTrackReport is_train_track(GraphMap const& m, int max_power) {
    TrainTrackReport rep;
    auto const&      T = *m.tree;
    auto const&      G = m.group();
    auto fail_turn = [&](int n, Germ const& a, Germ const& b, std::string why) {
      rep.ok = false;
      rep.power = n;
      rep.turn_a = a;
      rep.turn_b = b;
      rep.has_turn = true;
      rep.failure = why + ": turn " + describe(T, a) + " " + describe(T, b);
      return rep;
    };

    // (1) edge images are legal paths
    for (int e = 0; e < m.num_edges(); ++e) {
      auto p = map_edge(m, TreeEdge{NormalForm(), e});
      for (size_t j = 1; j < p.steps.size(); ++j) {
        auto a = T.end_germ(p.steps[j - 1]);
        auto b = T.start_germ(p.steps[j]);
        if (!is_legal_turn(m, a, b)) {
          return fail_turn(1, a, b, "image of edge '" + m.graph().edges()[e].id + "' has an illegal turn");
        }
      }
    }

    // (2) Df sends legal turns to legal turns. A turn (a, b, delta) maps to an
    // illegal turn (a', b', delta') exactly when
    // delta = phi^-1(u h_a delta' h_b^-1 u^-1), so the candidates are finite.
    auto table = compute_illegal_turns(m);
    for (int v = 0; v < m.graph().num_vertices(); ++v) {
      auto imgs = rep_images(m, v);
      auto x = T.base_vertex(v);
      for (int a = 0; a < static_cast<int>(imgs.size()); ++a) {
        for (int b = 0; b < static_cast<int>(imgs.size()); ++b) {
          auto const& w = imgs[a].w;
          for (auto const& t : table.at[w.base]) {
            if (t.rep_a != imgs[a].dec.rep || t.rep_b != imgs[b].dec.rep) {
              continue;
            }
            auto k = G.multiply(imgs[a].dec.h, t.delta, G.invert(imgs[b].dec.h));
            auto delta = solve_delta(m, v, w.label, k);
            if (!delta || table.is_illegal(v, a, b, *delta)) {
              continue;
            }
            auto ga = T.germ_at(x, {NormalForm(), a});
            auto gb = T.germ_at(x, {*delta, b});
            return fail_turn(1, ga, gb, "a legal turn maps to an illegal turn");
          }
        }
      }
    }

    // (3) iterated images stay reduced and legal
    for (int e = 0; e < m.num_edges(); ++e) {
      Path p = map_edge(m, TreeEdge{NormalForm(), e});
      for (int n = 2; n <= max_power; ++n) {
        p = map_path(m, p);
        for (size_t j = 1; j < p.steps.size(); ++j) {
          auto a = T.end_germ(p.steps[j - 1]);
          auto b = T.start_germ(p.steps[j]);
          if (a == b) {
            return fail_turn(n, a, b, "iterated image backtracks");
          }
          if (!is_legal_turn(m, a, b)) {
            return fail_turn(n, a, b, "iterated image of edge '" + m.graph().edges()[e].id + "' is not legal");
          }
        }
      }
    }
    rep.ok = true;
    return rep;
  }

  IntMatrix transition_matrix(GraphMap const& m) {
    int       n = m.num_edges();
    IntMatrix M(n, std::vector<long long>(n, 0));
    for (int e = 0; e < n; ++e) {
      for (auto const& s : m.edge_images[e]) {
        ++M[e][s.edge.edge];
      }
    }
    return M;
  }

  IntMatrix multiply(IntMatrix const& a, IntMatrix const& b) {
    size_t    n = a.size();
    IntMatrix c(n, std::vector<long long>(n, 0));
    for (size_t i = 0; i < n; ++i) {
      for (size_t k = 0; k < n; ++k) {
        if (a[i][k] == 0) {
          continue;
        }
        for (size_t j = 0; j < n; ++j) {
          c[i][j] += a[i][k] * b[k][j];
        }
      }
    }
    return c;
  }

  IntMatrix matrix_power(IntMatrix const& a, int n) {
    IntMatrix r(a.size(), std::vector<long long>(a.size(), 0));
    for (size_t i = 0; i < a.size(); ++i) {
      r[i][i] = 1;
    }
    for (int k = 0; k < n; ++k) {
      r = multiply(r, a);
    }
    return r;
  }

  StretchResult stretch_factor(IntMatrix const& M, double tol, int max_iterations) {
    size_t n = M.size();
    if (n == 0 || !(tol > 0)) {
      throw InputError("stretch_factor: empty matrix or non-positive tolerance");
    }
    bool nonzero = false;
    for (auto const& row : M) {
      if (row.size() != n) {
        throw InputError("stretch_factor: matrix is not square");
      }
      for (auto x : row) {
        if (x < 0) {
          throw InputError("stretch_factor: negative entry");
        }
        nonzero = nonzero || x != 0;
      }
    }
    if (!nonzero) {
      throw InputError("stretch_factor: zero matrix");
    }
    std::vector<long double> x(n, 1.0L), y(n);
    StretchResult            res;
    for (int it = 1; it <= max_iterations; ++it) {
      long double lo = HUGE_VALL, hi = 0, norm = 0;
      for (size_t i = 0; i < n; ++i) {
        long double s = x[i];
        for (size_t j = 0; j < n; ++j) {
          s += static_cast<long double>(M[i][j]) * x[j];
        }
        y[i] = s;
        lo = std::min(lo, s / x[i]);
        hi = std::max(hi, s / x[i]);
        norm = std::max(norm, s);
      }
      res.lower = static_cast<double>(lo - 1);
      res.upper = static_cast<double>(hi - 1);
      res.value = static_cast<double>((lo + hi) / 2 - 1);
      res.iterations = it;
      if (hi - lo <= tol * std::max<long double>(1, lo - 1)) {
        return res;
      }
      for (size_t i = 0; i < n; ++i) {
        x[i] = y[i] / norm;
      }
    }
    throw NumericalError("stretch_factor: no convergence, bracket width "
                         + std::to_string(res.upper - res.lower));
  }

  IrreducibilityReport check_irreducible(GraphMap const& m, int max_power) {
    int const n = m.num_edges();
    if (n > 20) {
      throw ResourceError("check_irreducible: more than 20 edge orbits");
    }
    IrreducibilityReport rep;
    auto const&          g = m.graph();
    auto                 M = transition_matrix(m);

    auto exceptional = [&](unsigned mask) {
      std::vector<int> parent(g.num_vertices());
      std::iota(parent.begin(), parent.end(), 0);
      auto find = [&](int x) {
        while (parent[x] != x) {
          x = parent[x] = parent[parent[x]];
        }
        return x;
      };
      for (int e = 0; e < n; ++e) {
        if (mask >> e & 1) {
          int a = find(g.edges()[e].from), b = find(g.edges()[e].to);
          if (a == b) {
            return false;
          }
          parent[a] = b;
        }
      }
      std::vector<int> singular(g.num_vertices(), 0);
      for (int v = 0; v < g.num_vertices(); ++v) {
        bool touched = false;
        for (int e = 0; e < n; ++e) {
          touched = touched || ((mask >> e & 1) && (g.edges()[e].from == v || g.edges()[e].to == v));
        }
        if (touched && g.is_singular(v) && ++singular[find(v)] > 1) {
          return false;
        }
      }
      return true;
    };

    std::set<unsigned> seen_exceptional;
    IntMatrix          P = M;
    rep.irreducible = true;
    for (int k = 1; k <= max_power; ++k) {
      if (k > 1) {
        P = multiply(P, M);
        for (auto& row : P) {
          for (auto& x : row) {
            x = x != 0;
          }
        }
      }
      std::vector<unsigned> support(n, 0);
      for (int e = 0; e < n; ++e) {
        for (int f = 0; f < n; ++f) {
          if (P[e][f]) {
            support[e] |= 1u << f;
          }
        }
      }
      unsigned const full = (1u << n) - 1;
      for (unsigned mask = 1; mask < full; ++mask) {
        bool invariant = true;
        for (int e = 0; e < n && invariant; ++e) {
          invariant = !(mask >> e & 1) || (support[e] & ~mask) == 0;
        }
        if (!invariant) {
          continue;
        }
        if (exceptional(mask)) {
          if (seen_exceptional.insert(mask).second) {
            std::vector<int> s;
            for (int e = 0; e < n; ++e) {
              if (mask >> e & 1) {
                s.push_back(e);
              }
            }
            rep.exceptional.push_back(s);
          }
          continue;
        }
        if (rep.irreducible) {
          rep.irreducible = false;
          rep.witness_power = k;
          for (int e = 0; e < n; ++e) {
            if (mask >> e & 1) {
              rep.witness.push_back(e);
            }
          }
        }
      }
    }

    // primitivity: some power of M is positive, Wielandt bound (n-1)^2 + 1
    IntMatrix B = M;
    for (auto& row : B) {
      for (auto& x : row) {
        x = x != 0;
      }
    }
    IntMatrix Q = B;
    for (int k = 1; k <= (n - 1) * (n - 1) + 1; ++k) {
      bool positive = true;
      for (auto const& row : Q) {
        for (auto x : row) {
          positive = positive && x != 0;
        }
      }
      if (positive) {
        rep.primitive = true;
        rep.primitive_power = k;
        break;
      }
      Q = multiply(Q, B);
      for (auto& row : Q) {
        for (auto& x : row) {
          x = x != 0;
        }
      }
    }
    return rep;
  }

  std::vector<Piece> iterate_pieces(GraphMap const& m, int e, int n) {
    std::vector<Piece> pieces{{Rational(0), Rational(1), TreeEdge{NormalForm(), e}, 1}};
    for (int k = 0; k < n; ++k) {
      std::vector<Piece> next;
      for (auto const& p : pieces) {
        auto       img = map_edge(m, p.edge);
        long const l = static_cast<long>(img.length());
        Rational   w = (p.hi - p.lo) / l;
        for (long j = 0; j < l; ++j) {
          if (p.dir > 0) {
            auto const& s = img.steps[j];
            next.push_back({p.lo + w * j, p.lo + w * (j + 1), s.edge, s.dir});
          } else {
            auto const& s = img.steps[l - 1 - j];
            next.push_back({p.lo + w * j, p.lo + w * (j + 1), s.edge, -s.dir});
          }
        }
      }
      pieces = std::move(next);
    }
    return pieces;
  }

  Rational piece_offset(Piece const& p, Rational const& t) {
    Rational w = p.hi - p.lo;
    return p.dir > 0 ? Rational((t - p.lo) / w) : Rational((p.hi - t) / w);
  }

}  // namespace flowcube
