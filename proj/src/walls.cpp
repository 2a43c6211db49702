#include "flowcube/walls.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "flowcube/errors.hpp"
#include "flowcube/io.hpp"

namespace flowcube {

  namespace {
    struct UnionFind {
      std::vector<int> parent;
      explicit UnionFind(size_t n = 0) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
      int  add() {
        parent.push_back(static_cast<int>(parent.size()));
        return parent.back();
      }
      int  find(int x) {
        while (parent[x] != x) {
          parent[x] = parent[parent[x]];
          x = parent[x];
        }
        return x;
      }
      bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) {
          return false;
        }
        parent[b] = a;
        return true;
      }
    };

    TreeVertex map_vertex_n(GraphMap const& m, TreeVertex v, int n) {
      for (int k = 0; k < n; ++k) {
        v = map_vertex(m, v);
      }
      return v;
    }

    RegionKey edge_region(RegionKind k, int level, TreeEdge const& e, int index = -1) {
      return {k, level, e, {}, index};
    }

    RegionKey vertex_region(RegionKind k, int level, TreeVertex const& v) { return {k, level, {}, v, -1}; }
  }  // namespace

  int WallComplex::region(RegionKey const& k) const {
    auto it = region_index.find(k);
    return it == region_index.end() ? -1 : it->second;
  }

  int WallComplex::component_of_bust(TreeEdge const& e, int level) const {
    auto it = node_index.find(NodeKey{NodeKind::primary_end, level, e, {}, -1, -1});
    return it == node_index.end() ? -1 : component_of_node[it->second];
  }

  WallComplex assemble_walls(GraphMap const& m, BustSystem const& b, WindowSpec const& spec_in) {
    auto const& T = *m.tree;
    WindowSpec  spec = spec_in;
    spec.scale = b.L;
    int const L = b.L, lo = spec.lo, hi = spec.hi;
    if (hi <= lo) {
      throw InputError("assemble_walls: the window needs at least one cylinder");
    }
    for (auto const& s : b.secondary) {
      auto it = b.primary.find(s.edge);
      if (it != b.primary.end() && it->second.lo <= s.span.hi && s.span.lo <= it->second.hi) {
        throw InputError("assemble_walls: a secondary bust meets a primary bust");
      }
    }
    WallComplex w;
    w.map = m;
    w.busts = b;
    w.window = build_window(m, spec);

    auto node = [&](NodeKey const& k) {
      auto [it, fresh] = w.node_index.try_emplace(k, static_cast<int>(w.nodes.size()));
      if (fresh) {
        w.nodes.push_back(k);
      }
      return it->second;
    };
    auto region = [&](RegionKey const& k) {
      auto [it, fresh] = w.region_index.try_emplace(k, static_cast<int>(w.regions.size()));
      if (fresh) {
        w.regions.push_back({k, false});
      }
      return it->second;
    };
    auto open = [&](int x, int y) { w.openings.push_back({x, y}); };
    auto piece = [&](PieceKey const& k, std::vector<int> nodes, std::vector<Face> faces) {
      w.piece_index[k] = static_cast<int>(w.pieces.size());
      w.pieces.push_back({k, std::move(nodes), std::move(faces)});
    };
    auto bust = [&](TreeEdge const& e) -> Interval const* {
      auto it = b.primary.find(e.edge);
      return it == b.primary.end() ? nullptr : &it->second;
    };
    // lower part of the slab over a sub-interval of e that avoids the bust
    auto lower = [&](TreeEdge const& e, int level, Rational const& x, Rational const& y) {
      auto d = bust(e);
      if (!d) {
        return region(edge_region(RegionKind::M, level, e));
      }
      if (y <= d->lo) {
        return region(edge_region(RegionKind::L, level, e));
      }
      if (x >= d->hi) {
        return region(edge_region(RegionKind::R, level, e));
      }
      throw std::logic_error("assemble_walls: an image of a gap meets a primary bust");
    };
    auto tree_regions = [&](int i) {
      for (auto const& v : w.window.at(i).vertices) {
        region(vertex_region(RegionKind::S, i, v));
      }
      for (auto const& e : w.window.at(i).edges) {
        int S0 = region(vertex_region(RegionKind::S, i, T.source(e)));
        int S1 = region(vertex_region(RegionKind::S, i, T.target(e)));
        if (bust(e)) {
          int Lr = region(edge_region(RegionKind::L, i, e));
          int Rr = region(edge_region(RegionKind::R, i, e));
          region(edge_region(RegionKind::B, i, e));
          open(S0, Lr);
          open(S1, Rr);
        } else {
          int Mr = region(edge_region(RegionKind::M, i, e));
          open(S0, Mr);
          open(S1, Mr);
        }
      }
    };

    std::vector<std::vector<Piece>> pieces_of(m.num_edges());
    for (int e = 0; e < m.num_edges(); ++e) {
      pieces_of[e] = iterate_pieces(m, e, L);
    }

    for (int i = lo; i < hi; ++i) {
      tree_regions(i);
      for (auto const& v : w.window.at(i).vertices) {
        int S = region(vertex_region(RegionKind::S, i, v));
        int Q = region(vertex_region(RegionKind::Qv, i, v));
        piece({PieceKind::star, i, {}, v, -1, 0}, {node({NodeKind::center, i, {}, v, -1, 0})}, {{S, Q}});
        open(Q, region(vertex_region(RegionKind::S, i + 1, map_vertex_n(m, v, L))));
      }
      for (auto const& e : w.window.at(i).edges) {
        auto d = bust(e);
        auto secs = secondaries_of(m, b, e);
        int  N = static_cast<int>(secs.size());
        int  p = 0;
        if (d) {
          p = static_cast<int>(std::count_if(secs.begin(), secs.end(), [&](auto const& s) { return s.span.hi < d->lo; }));
        }
        auto v0 = T.source(e), v1 = T.target(e);
        std::vector<int> Qe;
        for (int g = 0; g <= N; ++g) {
          Qe.push_back(region(edge_region(RegionKind::Qe, i, e, g)));
        }
        open(region(vertex_region(RegionKind::Qv, i, v0)), Qe.front());
        open(region(vertex_region(RegionKind::Qv, i, v1)), Qe.back());
        int Lr = -1, Rr = -1, Br = -1, Ur = -1, Mr = -1;
        if (d) {
          Lr = region(edge_region(RegionKind::L, i, e));
          Rr = region(edge_region(RegionKind::R, i, e));
          Br = region(edge_region(RegionKind::B, i, e));
          Ur = region(edge_region(RegionKind::U, i, e));
          open(Ur, Qe[p]);
        } else {
          Mr = region(edge_region(RegionKind::M, i, e));
        }
        std::vector<int> Tu;
        for (int k = 0; k < N; ++k) {
          Tu.push_back(region(edge_region(RegionKind::Tu, i, e, k)));
          open(Tu[k], d ? (k < p ? Lr : Rr) : Mr);
          open(Tu[k], region(edge_region(RegionKind::B, i + 1, secs[k].target)));
        }
        int Cm = -1, Cp = -1;
        if (d) {
          int Pm = node({NodeKind::primary_end, i, e, {}, -1, -1});
          int Pp = node({NodeKind::primary_end, i, e, {}, -1, 1});
          Cm = node({NodeKind::copy_end, i, e, {}, -1, -1});
          Cp = node({NodeKind::copy_end, i, e, {}, -1, 1});
          piece({PieceKind::slope, i, e, {}, -1, 1}, {Pp, Cm}, {{Br, Rr}, {Lr, Ur}});
          piece({PieceKind::slope, i, e, {}, -1, -1}, {Pm, Cp}, {{Br, Lr}, {Rr, Ur}});
        }
        // the arcs of T' along e between removed busts
        int  prev = node({NodeKind::center, i, {}, v0, -1, 0});
        int  gap = 0, arc = 0;
        bool before = true;
        auto add_arc = [&](int to) {
          int low = d ? (before ? Lr : Rr) : Mr;
          piece({PieceKind::arc, i, e, {}, arc++, 0}, {prev, to}, {{low, Qe[gap]}});
        };
        for (int k = 0; k <= N; ++k) {
          if (d && before && (k == N || secs[k].span.lo > d->hi)) {
            add_arc(Cm);
            before = false;
            prev = Cp;
          }
          if (k == N) {
            break;
          }
          auto const& s = secs[k];
          int         Sm = node({NodeKind::secondary_end, i, e, {}, k, -1});
          int         Sp = node({NodeKind::secondary_end, i, e, {}, k, 1});
          add_arc(Sm);
          int tm = node({NodeKind::primary_end, i + 1, s.target, {}, -1, s.dir > 0 ? -1 : 1});
          int tp = node({NodeKind::primary_end, i + 1, s.target, {}, -1, s.dir > 0 ? 1 : -1});
          piece({PieceKind::level, i, e, {}, k, -1}, {Sm, tm}, {{Tu[k], Qe[k]}});
          piece({PieceKind::level, i, e, {}, k, 1}, {Sp, tp}, {{Tu[k], Qe[k + 1]}});
          gap = k + 1;
          prev = Sp;
        }
        add_arc(node({NodeKind::center, i, {}, v1, -1, 0}));
        // gaps flow up onto the next tree
        auto h = m.phi.apply(e.g, L);
        for (int g = 0; g <= N; ++g) {
          Rational a = g == 0 ? Rational(0) : secs[g - 1].span.hi;
          Rational c = g == N ? Rational(1) : secs[g].span.lo;
          for (auto const& pc : pieces_of[e.edge]) {
            Rational x0 = std::max(a, pc.lo), y0 = std::min(c, pc.hi);
            if (y0 <= x0) {
              continue;
            }
            TreeEdge tau = T.act(h, pc.edge);
            Rational x = piece_offset(pc, x0), y = piece_offset(pc, y0);
            if (y < x) {
              std::swap(x, y);
            }
            open(Qe[g], lower(tau, i + 1, x, y));
            if (x == 0) {
              open(Qe[g], region(vertex_region(RegionKind::S, i + 1, T.source(tau))));
            }
            if (y == 1) {
              open(Qe[g], region(vertex_region(RegionKind::S, i + 1, T.target(tau))));
            }
          }
        }
      }
    }
    tree_regions(hi);

    // frontier: regions whose neighbourhood is not fully materialized
    std::vector<std::map<TreeVertex, int>> degree(hi - lo + 1);
    for (int i = lo; i <= hi; ++i) {
      for (auto const& e : w.window.at(i).edges) {
        ++degree[i - lo][T.source(e)];
        ++degree[i - lo][T.target(e)];
      }
    }
    auto vertex_complete = [&](int i, TreeVertex const& v) {
      if (!w.window.covers(i) || T.is_singular(v) || !w.window.at(i).contains(v)) {
        return false;
      }
      auto it = degree[i - lo].find(v);
      return it != degree[i - lo].end() && it->second == m.graph().valence(v.base);
    };
    auto preimages_present = [&](int i, TreeEdge const& tau) {
      for (int e = 0; e < m.num_edges(); ++e) {
        for (auto const& pc : pieces_of[e]) {
          if (pc.edge.edge != tau.edge) {
            continue;
          }
          auto     gx = m.group().multiply(tau.g, m.group().invert(pc.edge.g));
          TreeEdge pre{m.phi.apply(gx, -L), e};
          if (!w.window.at(i - 1).contains(pre)) {
            return false;
          }
        }
      }
      return true;
    };
    auto vertex_preimages_present = [&](int i, TreeVertex const& v) {
      try {
        auto bt = backward_flow_tree(m, FlowPoint{0, TreePoint::at(v)}, L);
        for (int leaf : bt.leaves) {
          auto const& p = bt.nodes[leaf].point.point;
          if (p.on_vertex ? !w.window.at(i - 1).contains(p.vertex) : !w.window.at(i - 1).contains(p.edge)) {
            return false;
          }
        }
        return true;
      } catch (ResourceError const&) {
        return false;
      }
    };
    for (auto& r : w.regions) {
      auto const& k = r.key;
      bool is_lower = k.kind == RegionKind::S || k.kind == RegionKind::L || k.kind == RegionKind::R
                      || k.kind == RegionKind::M || k.kind == RegionKind::B;
      bool is_vertex = k.kind == RegionKind::S || k.kind == RegionKind::Qv;
      bool f = k.level >= hi || (is_lower && k.level <= lo);
      if (!f && is_vertex) {
        f = !vertex_complete(k.level, k.vertex);
        if (!f && k.kind == RegionKind::S) {
          f = !vertex_preimages_present(k.level, k.vertex);
        }
      }
      if (!f && !is_vertex) {
        f = !w.window.at(k.level).contains(k.edge);
        if (!f && is_lower) {
          f = !preimages_present(k.level, k.edge);
        }
      }
      r.frontier = f;
    }

    // components
    UnionFind uf(w.nodes.size());
    for (auto const& pc : w.pieces) {
      for (size_t j = 1; j < pc.nodes.size(); ++j) {
        uf.unite(pc.nodes[0], pc.nodes[j]);
      }
    }
    std::map<int, int> comp_id;
    w.component_of_node.assign(w.nodes.size(), -1);
    for (size_t n = 0; n < w.nodes.size(); ++n) {
      int root = uf.find(static_cast<int>(n));
      auto [it, fresh] = comp_id.try_emplace(root, static_cast<int>(comp_id.size()));
      if (fresh) {
        w.components.push_back({it->second, {}, {}, false});
      }
      w.component_of_node[n] = it->second;
      w.components[it->second].nodes.push_back(static_cast<int>(n));
      if (w.nodes[n].level >= hi) {
        w.components[it->second].truncated = true;
      }
    }
    for (size_t p = 0; p < w.pieces.size(); ++p) {
      auto& c = w.components[w.component_of_piece(static_cast<int>(p))];
      c.pieces.push_back(static_cast<int>(p));
      for (auto const& f : w.pieces[p].faces) {
        if (w.regions[f.neg].frontier || w.regions[f.pos].frontier) {
          c.truncated = true;
        }
      }
    }
    return w;
  }

  namespace {
    // Offset of a node of T' or T_(L level) along the edge e.
    Rational node_offset(WallComplex const& w, NodeKey const& n, TreeEdge const& e) {
      auto const& T = *w.map.tree;
      switch (n.kind) {
        case NodeKind::primary_end:
        case NodeKind::copy_end: {
          auto const& d = w.busts.primary.at(n.edge.edge);
          return n.sign < 0 ? d.lo : d.hi;
        }
        case NodeKind::secondary_end: {
          auto s = w.busts.on_edge(n.edge.edge).at(n.index);
          return n.sign < 0 ? s.span.lo : s.span.hi;
        }
        case NodeKind::center:
          return n.vertex == T.source(e) ? Rational(0) : Rational(1);
      }
      return Rational(0);
    }

    std::set<int> piece_set(WallComplex const& w, std::vector<int> const& components) {
      std::set<int> out;
      for (int c : components) {
        for (int p : w.components.at(c).pieces) {
          out.insert(p);
        }
      }
      return out;
    }
  }  // namespace

  FoldedWall fold_wall(WallComplex const& w, int component) {
    auto const& m = w.map;
    auto const& T = *m.tree;
    int const   L = w.busts.L;
    FoldedWall  out;
    using Seg = std::tuple<int, TreePoint, TreePoint>;
    std::set<Seg> segs;
    out.ok = true;
    for (int p : w.components.at(component).pieces) {
      auto const& pc = w.pieces[p];
      if (pc.key.kind != PieceKind::level) {
        continue;
      }
      auto const& k = pc.key;
      auto        secs = secondaries_of(m, w.busts, k.edge);
      auto const& s = secs.at(k.index);
      Rational    t = k.sign < 0 ? s.span.lo : s.span.hi;
      FoldedLevel fl;
      fl.piece = p;
      TreePoint x = T.point(k.edge, t);
      fl.chain.push_back({L * k.level, x});
      for (int j = 0; j < L; ++j) {
        TreePoint y = map_point(m, x);
        segs.insert({L * k.level + j, x, y});
        x = y;
        fl.chain.push_back({L * k.level + j + 1, x});
      }
      auto const& tn = w.nodes[pc.nodes[1]];
      TreePoint   target = T.point(tn.edge, node_offset(w, tn, tn.edge));
      fl.endpoints_ok = tn.kind == NodeKind::primary_end && tn.level == k.level + 1 && x == target;
      // F through the affine piece against the step-by-step flow
      auto h = m.phi.apply(k.edge.g, L);
      for (auto const& piece : iterate_pieces(m, k.edge.edge, L)) {
        if (piece.lo <= t && t <= piece.hi) {
          fl.square_ok = T.point(T.act(h, piece.edge), piece_offset(piece, t)) == x;
          break;
        }
      }
      out.ok = out.ok && fl.endpoints_ok && fl.square_ok;
      out.levels.push_back(std::move(fl));
    }
    out.unit_segments = static_cast<int>(segs.size());
    out.unfolded_segments = L * static_cast<int>(out.levels.size());
    return out;
  }

  Approximation approximate_wall(WallComplex const& w, std::vector<int> const& components,
                                 std::vector<std::pair<int, TreeVertex>> const& lines_through) {
    auto const& m = w.map;
    auto const& T = *m.tree;
    int const   L = w.busts.L;
    using Pt = std::pair<int, TreePoint>;
    std::map<std::pair<int, TreeEdge>, std::vector<Interval>> intervals;
    std::set<Pt>                                              marks;
    std::set<std::pair<Pt, Pt>>                               horizontal;

    auto add_interval = [&](int level, TreeEdge const& e, Rational x, Rational y) {
      if (y < x) {
        std::swap(x, y);
      }
      intervals[{level, e}].push_back({x, y});
      marks.insert({level, T.point(e, x)});
      marks.insert({level, T.point(e, y)});
    };
    auto add_flow = [&](int level, TreePoint x, int steps) {
      for (int j = 0; j < steps; ++j) {
        TreePoint y = map_point(m, x);
        Pt        a{level + j, x}, c{level + j + 1, y};
        horizontal.insert({a, c});
        marks.insert(a);
        marks.insert(c);
        x = y;
      }
    };

    for (int p : piece_set(w, components)) {
      auto const& pc = w.pieces[p];
      auto const& k = pc.key;
      int const   top = L * (k.level + 1);
      switch (k.kind) {
        case PieceKind::arc: {
          Rational a = node_offset(w, w.nodes[pc.nodes[0]], k.edge);
          Rational c = node_offset(w, w.nodes[pc.nodes[1]], k.edge);
          auto     h = m.phi.apply(k.edge.g, L);
          for (auto const& piece : iterate_pieces(m, k.edge.edge, L)) {
            Rational x0 = std::max(a, piece.lo), y0 = std::min(c, piece.hi);
            if (y0 > x0) {
              add_interval(top, T.act(h, piece.edge), piece_offset(piece, x0), piece_offset(piece, y0));
            }
          }
          break;
        }
        case PieceKind::level: {
          auto const& n = w.nodes[pc.nodes[1]];
          marks.insert({top, T.point(n.edge, node_offset(w, n, n.edge))});
          break;
        }
        case PieceKind::slope: {
          auto const& d = w.busts.primary.at(k.edge.edge);
          add_interval(L * k.level, k.edge, d.lo, d.hi);
          add_flow(L * k.level, T.point(k.edge, k.sign > 0 ? d.lo : d.hi), L);
          break;
        }
        case PieceKind::star:
          marks.insert({top, TreePoint::at(map_vertex_n(m, k.vertex, L))});
          break;
      }
    }
    for (auto const& [level, v] : lines_through) {
      auto line = principal_flow_line(m, v, L * level, L * w.window.lo, L * w.window.hi);
      for (auto it = line.chain.begin(); std::next(it) != line.chain.end(); ++it) {
        Pt a{it->first, TreePoint::at(it->second)}, c{std::next(it)->first, TreePoint::at(std::next(it)->second)};
        horizontal.insert({a, c});
        marks.insert(a);
        marks.insert(c);
      }
    }

    std::map<Pt, int> id;
    auto              vid = [&](Pt const& x) { return id.try_emplace(x, static_cast<int>(id.size())).first->second; };
    std::vector<std::pair<int, int>> edges;
    for (auto& [key, list] : intervals) {
      auto const& [level, e] = key;
      std::sort(list.begin(), list.end(), [](auto const& x, auto const& y) { return x.lo < y.lo; });
      std::vector<Interval> merged;
      for (auto const& iv : list) {
        if (!merged.empty() && iv.lo <= merged.back().hi) {
          merged.back().hi = std::max(merged.back().hi, iv.hi);
        } else {
          merged.push_back(iv);
        }
      }
      for (auto const& iv : merged) {
        std::set<Rational> cuts{iv.lo, iv.hi};
        for (auto it = marks.lower_bound({level, TreePoint{}}); it != marks.end() && it->first == level; ++it) {
          auto const& q = it->second;
          if (!q.on_vertex && q.edge == e && iv.lo < q.t && q.t < iv.hi) {
            cuts.insert(q.t);
          }
        }
        for (auto it = cuts.begin(); std::next(it) != cuts.end(); ++it) {
          edges.push_back({vid({level, T.point(e, *it)}), vid({level, T.point(e, *std::next(it))})});
        }
      }
    }
    for (auto const& [a, c] : horizontal) {
      edges.push_back({vid(a), vid(c)});
    }
    for (auto const& x : marks) {
      vid(x);
    }
    Approximation out;
    out.vertices = static_cast<int>(id.size());
    out.edges = static_cast<int>(edges.size());
    UnionFind uf(id.size());
    int       parts = out.vertices;
    for (auto const& [a, c] : edges) {
      if (uf.unite(a, c)) {
        --parts;
      } else {
        ++out.cycles;
      }
    }
    out.connected = parts == 1;
    out.is_tree = out.connected && out.cycles == 0;
    return out;
  }

  namespace {
    char const* kind_name(RegionKind k) {
      static char const* names[] = {"S", "L", "R", "M", "B", "U", "Qv", "Qe", "Tu"};
      return names[static_cast<int>(k)];
    }

    char const* kind_name(PieceKind k) {
      static char const* names[] = {"slope", "level", "arc", "star"};
      return names[static_cast<int>(k)];
    }

    std::string region_name(WallComplex const& w, int r) {
      auto const& T = *w.map.tree;
      auto const& k = w.regions[r].key;
      std::string s = std::string(kind_name(k.kind)) + "@" + std::to_string(k.level) + ":";
      if (k.kind == RegionKind::S || k.kind == RegionKind::Qv) {
        s += format_vertex(T, k.vertex);
      } else {
        s += format_edge(T, k.edge);
      }
      if (k.index >= 0) {
        s += "#" + std::to_string(k.index);
      }
      return s;
    }

    std::string piece_name(WallComplex const& w, WallPiece const& p) {
      auto const& T = *w.map.tree;
      auto const& k = p.key;
      std::string s = std::string(kind_name(k.kind)) + "@" + std::to_string(k.level) + ":";
      s += k.kind == PieceKind::star ? format_vertex(T, k.vertex) : format_edge(T, k.edge);
      if (k.index >= 0) {
        s += "#" + std::to_string(k.index);
      }
      if (k.sign != 0) {
        s += k.sign > 0 ? "+" : "-";
      }
      return s;
    }

    std::string node_name(WallComplex const& w, int n) {
      auto const&        T = *w.map.tree;
      auto const&        k = w.nodes[n];
      static char const* names[] = {"P", "P'", "S'", "V'"};
      std::string        s = std::string(names[static_cast<int>(k.kind)]) + "@" + std::to_string(k.level) + ":";
      s += k.kind == NodeKind::center ? format_vertex(T, k.vertex) : format_edge(T, k.edge);
      if (k.index >= 0) {
        s += "#" + std::to_string(k.index);
      }
      if (k.sign != 0) {
        s += k.sign > 0 ? "+" : "-";
      }
      return s;
    }
  }  // namespace

  std::string wall_to_json(WallComplex const& w, std::vector<int> const& components) {
    using nlohmann::json;
    json out;
    out["L"] = w.busts.L;
    out["window"] = {{"lo", w.window.lo}, {"hi", w.window.hi}};
    json busts = json::object();
    for (auto const& [e, d] : w.busts.primary) {
      busts[w.map.graph().edges()[e].id] = {to_string(d.lo), to_string(d.hi)};
    }
    out["primary_busts"] = busts;
    json comps = json::array();
    for (int c : components) {
      auto const& wc = w.components.at(c);
      json        pieces = json::array();
      for (int p : wc.pieces) {
        json faces = json::array();
        for (auto const& f : w.pieces[p].faces) {
          faces.push_back({{"neg", region_name(w, f.neg)}, {"pos", region_name(w, f.pos)}});
        }
        json nodes = json::array();
        for (int n : w.pieces[p].nodes) {
          nodes.push_back(node_name(w, n));
        }
        pieces.push_back({{"piece", piece_name(w, w.pieces[p])}, {"nodes", nodes}, {"faces", faces}});
      }
      comps.push_back({{"id", c}, {"truncated", wc.truncated}, {"pieces", pieces}});
    }
    out["components"] = comps;
    return out.dump(2);
  }

  std::string wall_to_dot(WallComplex const& w, std::vector<int> const& components) {
    std::ostringstream os;
    os << "graph wall {\n";
    std::set<int> nodes;
    for (int p : piece_set(w, components)) {
      for (int n : w.pieces[p].nodes) {
        nodes.insert(n);
      }
    }
    for (int n : nodes) {
      os << "  n" << n << " [label=\"" << node_name(w, n) << "\"];\n";
    }
    for (int p : piece_set(w, components)) {
      auto const& pc = w.pieces[p];
      if (pc.nodes.size() == 2) {
        os << "  n" << pc.nodes[0] << " -- n" << pc.nodes[1] << " [label=\"" << kind_name(pc.key.kind) << "\"];\n";
      }
    }
    os << "}\n";
    return os.str();
  }

}  // namespace flowcube
