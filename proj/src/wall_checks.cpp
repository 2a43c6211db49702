#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

#include "flowcube/errors.hpp"
#include "flowcube/io.hpp"
#include "flowcube/walls.hpp"

namespace flowcube {

  namespace {
    struct UnionFind {
      std::vector<int> parent;
      explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
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

    std::set<int> piece_set(WallComplex const& w, std::vector<int> const& components) {
      std::set<int> out;
      for (int c : components) {
        for (int p : w.components.at(c).pieces) {
          out.insert(p);
        }
      }
      return out;
    }

    int star_piece(WallComplex const& w, int level, TreeVertex const& v) {
      auto it = w.piece_index.find(PieceKey{PieceKind::star, level, {}, v, -1, 0});
      return it == w.piece_index.end() ? -1 : it->second;
    }

    // Components of the star nuclei met by a line at levels i + k step.
    std::set<int> components_on_line(WallComplex const& w, PrincipalLine const& line, int i, int step,
                                     bool& missing) {
      std::set<int> out;
      for (auto const& [j, u] : line.chain) {
        if ((j - i) % step != 0 || j >= w.window.hi) {
          continue;
        }
        int p = star_piece(w, j, u);
        if (p < 0) {
          missing = true;
        } else {
          out.insert(w.component_of_piece(p));
        }
      }
      return out;
    }

    bool same_line(PrincipalLine const& a, PrincipalLine const& b) { return a.chain == b.chain; }

    std::vector<PrincipalLine> lines_of(WallComplex const& w, std::vector<int> const& components) {
      std::vector<PrincipalLine> out;
      for (auto const& [i, v] : singular_vertices(w, components)) {
        auto line = window_line(w, v, i);
        if (std::none_of(out.begin(), out.end(), [&](auto const& x) { return same_line(x, line); })) {
          out.push_back(std::move(line));
        }
      }
      return out;
    }

    void run_saturation(WallComplex const& w, Saturation& s) {
      int const L = w.busts.L;
      if (s.M <= 0 || s.M % L != 0) {
        throw InputError("saturate_wall: M must be a positive multiple of L");
      }
      int const     step = s.M / L;
      std::set<int> in(s.components.begin(), s.components.end());
      std::deque<std::pair<int, TreeVertex>> queue;
      std::set<std::pair<int, TreeVertex>>   seen;
      for (auto const& x : singular_vertices(w, s.components)) {
        queue.push_back(x);
      }
      auto const& T = *w.map.tree;
      while (!queue.empty()) {
        auto x = queue.front();
        queue.pop_front();
        if (!seen.insert(x).second) {
          continue;
        }
        auto [i, v] = x;
        auto line = window_line(w, v, i);
        bool missing = false;
        auto comps = components_on_line(w, line, i, step, missing);
        s.truncated = s.truncated || missing;
        std::string where = format_vertex(T, v) + "@" + std::to_string(i);
        if (comps.size() == 1) {
          s.trace.push_back(where + ": one wall along the line");
          continue;
        }
        for (int c : comps) {
          if (in.insert(c).second) {
            s.components.push_back(c);
            s.trace.push_back(where + ": attach component " + std::to_string(c));
            for (auto const& y : singular_vertices(w, {c})) {
              queue.push_back(y);
            }
          }
        }
      }
      s.lines = lines_of(w, s.components);
      // components and lines form a connected graph
      size_t const nc = s.components.size();
      UnionFind    uf(nc + s.lines.size());
      std::map<int, int> pos;
      for (size_t k = 0; k < nc; ++k) {
        pos[s.components[k]] = static_cast<int>(k);
      }
      for (size_t l = 0; l < s.lines.size(); ++l) {
        for (auto const& [j, u] : s.lines[l].chain) {
          int p = j < w.window.hi ? star_piece(w, j, u) : -1;
          if (p >= 0 && pos.count(w.component_of_piece(p))) {
            uf.unite(static_cast<int>(nc + l), pos[w.component_of_piece(p)]);
          }
        }
      }
      std::set<int> roots;
      for (size_t k = 0; k < nc + s.lines.size(); ++k) {
        roots.insert(uf.find(static_cast<int>(k)));
      }
      s.connected = roots.size() == 1;
    }
  }  // namespace

  std::vector<std::pair<int, TreeVertex>> singular_vertices(WallComplex const& w, std::vector<int> const& components) {
    std::set<std::pair<int, TreeVertex>> out;
    for (int p : piece_set(w, components)) {
      auto const& k = w.pieces[p].key;
      if (k.kind == PieceKind::star && w.map.tree->is_singular(k.vertex)) {
        out.insert({k.level, k.vertex});
      }
    }
    return {out.begin(), out.end()};
  }

  PrincipalLine window_line(WallComplex const& w, TreeVertex const& v, int level) {
    int const L = w.busts.L;
    auto      full = principal_flow_line(w.map, v, L * level, L * w.window.lo, L * w.window.hi);
    PrincipalLine out{level, v, {}, {}};
    for (int j = w.window.lo; j <= w.window.hi; ++j) {
      out.chain[j] = full.chain.at(L * j);
      out.stabilizers[j] = full.stabilizers.at(L * j);
    }
    return out;
  }

  SeparationReport check_separation(WallComplex const& w, std::vector<int> const& components, int margin) {
    auto const       in_w = piece_set(w, components);
    size_t const     n = w.regions.size();
    UnionFind        uf(n);
    std::vector<std::vector<int>> adj(n);
    for (auto const& [a, b] : w.openings) {
      uf.unite(a, b);
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    for (size_t p = 0; p < w.pieces.size(); ++p) {
      if (in_w.count(static_cast<int>(p))) {
        continue;
      }
      for (auto const& f : w.pieces[p].faces) {
        uf.unite(f.neg, f.pos);
        adj[f.neg].push_back(f.pos);
        adj[f.pos].push_back(f.neg);
      }
    }
    SeparationReport rep;
    std::map<int, int> class_id;
    rep.class_of_region.resize(n);
    for (size_t r = 0; r < n; ++r) {
      auto [it, fresh] = class_id.try_emplace(uf.find(static_cast<int>(r)), static_cast<int>(class_id.size()));
      if (fresh) {
        rep.classes.push_back({});
      }
      rep.class_of_region[r] = it->second;
      auto& c = rep.classes[it->second];
      ++c.regions;
      c.frontier = c.frontier || w.regions[r].frontier;
    }
    std::vector<int> bits(rep.classes.size(), 0);
    std::vector<int> dist(n, -1);
    std::deque<int>  queue;
    for (int p : in_w) {
      for (auto const& f : w.pieces[p].faces) {
        bits[rep.class_of_region[f.neg]] |= 1;
        bits[rep.class_of_region[f.pos]] |= 2;
        for (int r : {f.neg, f.pos}) {
          if (dist[r] < 0) {
            dist[r] = 0;
            queue.push_back(r);
          }
        }
      }
    }
    while (!queue.empty()) {
      int r = queue.front();
      queue.pop_front();
      for (int s : adj[r]) {
        if (dist[s] < 0) {
          dist[s] = dist[r] + 1;
          queue.push_back(s);
        }
      }
    }
    bool neg = false, pos = false, both = false;
    for (size_t c = 0; c < rep.classes.size(); ++c) {
      auto& info = rep.classes[c];
      info.side = bits[c] == 0 ? 0 : bits[c] == 1 ? -1 : bits[c] == 2 ? 1 : 2;
      neg = neg || info.side == -1;
      pos = pos || info.side == 1;
      both = both || info.side == 2;
      rep.detached += info.side == 0 ? 1 : 0;
      rep.components += info.side != 0 ? 1 : 0;
    }
    std::vector<bool> interior(rep.classes.size(), false);
    for (size_t r = 0; r < n; ++r) {
      if (!w.regions[r].frontier) {
        interior[rep.class_of_region[r]] = true;
      }
    }
    for (size_t c = 0; c < rep.classes.size(); ++c) {
      rep.detached_interior += rep.classes[c].side == 0 && interior[c] ? 1 : 0;
    }
    for (size_t r = 0; r < n; ++r) {
      auto& info = rep.classes[rep.class_of_region[r]];
      if (w.regions[r].frontier && dist[r] >= margin) {
        info.deep = true;
      }
    }
    for (auto const& info : rep.classes) {
      rep.negative_deep = rep.negative_deep || (info.side == -1 && info.deep);
      rep.positive_deep = rep.positive_deep || (info.side == 1 && info.deep);
    }
    rep.two_sided = neg && pos && !both;
    // the bottom triangle of every primary bust of the wall lies on the negative side
    std::set<int> audited;
    rep.same_side_busts = true;
    for (int p : in_w) {
      for (int nd : w.pieces[p].nodes) {
        auto const& k = w.nodes[nd];
        if (k.kind != NodeKind::primary_end || !audited.insert(nd).second) {
          continue;
        }
        int b = w.region(RegionKey{RegionKind::B, k.level, k.edge, {}, -1});
        if (b >= 0) {
          ++rep.busts_audited;
          rep.same_side_busts = rep.same_side_busts && rep.side_of_region(b) == -1;
        }
      }
    }
    if (both) {
      rep.verdict = "not separating";
    } else if (rep.two_sided && rep.components == 2 && rep.detached_interior == 0 && rep.negative_deep
               && rep.positive_deep) {
      rep.verdict = "wall";
    } else {
      rep.verdict = "inconclusive";
    }
    return rep;
  }

  Saturation saturate_wall(WallComplex const& w, int component, int M) {
    Saturation s;
    s.base = component;
    s.M = M;
    s.components = {component};
    run_saturation(w, s);
    return s;
  }

  Saturation saturate_wall(WallComplex const& w, Saturation const& prev) {
    Saturation s;
    s.base = prev.base;
    s.M = prev.M;
    s.components = prev.components;
    run_saturation(w, s);
    return s;
  }

  SaturationAudit audit_saturation(WallComplex const& w, Saturation const& s) {
    SaturationAudit a;
    std::set<int>   in(s.components.begin(), s.components.end());
    a.contains_base = in.count(s.base) != 0;
    a.closed = true;
    std::set<int> required{s.base};
    int const     step = s.M / w.busts.L;
    for (auto const& [i, v] : singular_vertices(w, s.components)) {
      bool missing = false;
      auto comps = components_on_line(w, window_line(w, v, i), i, step, missing);
      if (comps.size() == 1) {
        continue;
      }
      for (int c : comps) {
        required.insert(c);
        if (!in.count(c)) {
          a.closed = false;
          a.detail += "component " + std::to_string(c) + " is on a line of the wall but was not attached; ";
        }
      }
    }
    a.minimal = std::all_of(in.begin(), in.end(), [&](int c) { return required.count(c) != 0; });
    if (!a.minimal) {
      a.detail += "an attached component is not required; ";
    }
    auto lines = lines_of(w, s.components);
    a.lines_match = lines.size() == s.lines.size()
                    && std::all_of(lines.begin(), lines.end(), [&](auto const& x) {
                         return std::any_of(s.lines.begin(), s.lines.end(), [&](auto const& y) { return same_line(x, y); });
                       });
    a.ok = a.contains_base && a.closed && a.minimal && a.lines_match;
    return a;
  }

  namespace {
    // Side of the class holding the complementary regions along a line: -1,
    // +1, 0 when undecided. Sets inside when the line is a line of W.
    int line_side(WallComplex const& w, Saturation const& s, SeparationReport const& sep,
                  std::set<int> const& in_w, PrincipalLine const& line, bool& inside) {
      inside = std::any_of(s.lines.begin(), s.lines.end(), [&](auto const& x) { return same_line(x, line); });
      if (inside) {
        return 0;
      }
      std::set<int> sides;
      for (auto const& [j, u] : line.chain) {
        int p = j < w.window.hi ? star_piece(w, j, u) : -1;
        if (p >= 0 && in_w.count(p)) {
          throw InputError("check_cut: the probe line meets the star nuclei of the wall");
        }
        for (auto kind : {RegionKind::S, RegionKind::Qv}) {
          int r = w.region(RegionKey{kind, j, {}, u, -1});
          if (r >= 0) {
            sides.insert(sep.side_of_region(r));
          }
        }
      }
      // classes cut off by the window carry no side
      sides.erase(0);
      if (sides.size() != 1) {
        return 0;
      }
      int x = *sides.begin();
      return x == 2 ? 0 : x;
    }

    bool all_lines_ok(WallComplex const& w, Saturation const& s, SeparationReport const& sep, std::set<int> const& in_w) {
      auto const& T = *w.map.tree;
      int const   lo = w.window.lo;
      for (auto const& v : w.window.at(lo).vertices) {
        if (!T.is_singular(v)) {
          continue;
        }
        auto line = window_line(w, v, lo);
        bool inside = false;
        try {
          int side = line_side(w, s, sep, in_w, line, inside);
          (void)side;
        } catch (InputError const&) {
          return false;
        }
        for (auto const& [j, u] : line.chain) {
          int r = w.region(RegionKey{RegionKind::S, j, {}, u, -1});
          if (!inside && r >= 0 && sep.side_of_region(r) == 2) {
            return false;
          }
        }
      }
      return true;
    }
  }  // namespace

  CutReport check_cut(WallComplex const& w, Saturation const& s, PrincipalLine const& a, PrincipalLine const& b) {
    auto      sep = check_separation(w, s.components, 1);
    auto      in_w = piece_set(w, s.components);
    CutReport rep;
    bool      ia = false, ib = false;
    rep.side_a = line_side(w, s, sep, in_w, a, ia);
    rep.side_b = line_side(w, s, sep, in_w, b, ib);
    rep.lines_ok = all_lines_ok(w, s, sep, in_w);
    if (ia || ib) {
      rep.verdict = "inside W";
      rep.detail = ia ? "the first line is a line of the wall" : "the second line is a line of the wall";
    } else if (rep.side_a == 0 || rep.side_b == 0) {
      rep.verdict = "inconclusive";
      rep.detail = "a line meets no face of the wall inside the window";
    } else if (rep.side_a == rep.side_b) {
      rep.verdict = "same side";
    } else {
      rep.verdict = "separated";
    }
    return rep;
  }

  CutReport check_cut(WallComplex const& w, Saturation const& s, PrincipalLine const& a) {
    auto      sep = check_separation(w, s.components, 1);
    auto      in_w = piece_set(w, s.components);
    CutReport rep;
    bool      inside = false;
    rep.side_a = rep.side_b = line_side(w, s, sep, in_w, a, inside);
    rep.lines_ok = all_lines_ok(w, s, sep, in_w);
    rep.verdict = inside ? "inside W" : rep.side_a == 0 ? "inconclusive" : "same side";
    return rep;
  }

  OverlapReport ladder_overlap_diameter(WallComplex const& w, std::vector<int> const& components, int R) {
    auto const& m = w.map;
    auto const& T = *m.tree;
    int const   L = w.busts.L;
    auto const& base = w.window.at(w.window.lo);
    auto        fine = build_window(m, WindowSpec{L * w.window.lo, L * w.window.hi, base.radius, base.angle_cap, 1,
                                                  base.center});
    using Node = std::pair<int, TreeVertex>;
    std::map<Node, std::map<Node, int>> cache;
    auto distances = [&](Node const& x) -> std::map<Node, int> const& {
      auto it = cache.find(x);
      if (it == cache.end()) {
        it = cache.emplace(x, skeleton_distances(T, fine, x.first, x.second)).first;
      }
      return it->second;
    };
    std::vector<std::set<Node>> hoods;
    std::set<int>               seen;
    for (int p : piece_set(w, components)) {
      auto const& k = w.pieces[p].key;
      if (k.kind != PieceKind::slope || !seen.insert(w.pieces[p].nodes[0]).second) {
        continue;
      }
      std::set<Node> ladder;
      TreePoint      x = T.point(k.edge, w.busts.primary.at(k.edge.edge).lo);
      for (int j = 0; j <= L; ++j) {
        int level = L * k.level + j;
        if (x.on_vertex) {
          ladder.insert({level, x.vertex});
        } else {
          ladder.insert({level, T.source(x.edge)});
          ladder.insert({level, T.target(x.edge)});
        }
        x = map_point(m, x);
      }
      std::set<Node> hood;
      for (auto const& y : ladder) {
        for (auto const& [z, d] : distances(y)) {
          if (d <= R) {
            hood.insert(z);
          }
        }
      }
      hoods.push_back(std::move(hood));
    }
    OverlapReport rep;
    for (size_t a = 0; a < hoods.size(); ++a) {
      for (size_t b = a + 1; b < hoods.size(); ++b) {
        std::vector<Node> both;
        std::set_intersection(hoods[a].begin(), hoods[a].end(), hoods[b].begin(), hoods[b].end(),
                              std::back_inserter(both));
        if (both.empty()) {
          continue;
        }
        ++rep.pairs;
        for (auto const& x : both) {
          auto const& dx = distances(x);
          for (auto const& y : both) {
            auto it = dx.find(y);
            if (it != dx.end()) {
              rep.B = std::max(rep.B, it->second);
            }
          }
        }
      }
    }
    return rep;
  }

  std::vector<FlowElement> wall_stabilizer_search(WallComplex const& w, std::vector<int> const& components,
                                                  int word_bound, int power_bound) {
    auto const& m = w.map;
    auto const& T = *m.tree;
    auto const& G = m.group();
    int const   L = w.busts.L;
    auto const  in_w = piece_set(w, components);
    std::vector<FlowElement> out;
    for (auto const& g : G.words_up_to(G.all_generators(), word_bound)) {
      for (int kappa = -power_bound; kappa <= power_bound; ++kappa) {
        std::map<int, NormalForm> twist;
        int                       hits = 0;
        bool                      ok = true;
        for (int p : in_w) {
          auto key = w.pieces[p].key;
          key.level += kappa;
          if (!w.window.covers(key.level)) {
            continue;
          }
          auto it = twist.find(key.level);
          if (it == twist.end()) {
            it = twist.emplace(key.level, m.phi.apply(g, L * key.level)).first;
          }
          if (key.kind == PieceKind::star) {
            key.vertex = T.act(it->second, key.vertex);
          } else {
            key.edge = T.act(it->second, key.edge);
          }
          auto found = w.piece_index.find(key);
          if (found == w.piece_index.end()) {
            continue;
          }
          ++hits;
          if (!in_w.count(found->second)) {
            ok = false;
            break;
          }
        }
        if (ok && hits > 0) {
          out.push_back({g, kappa * L});
        }
      }
    }
    return out;
  }

  WallSearch search_wall_system(GraphMap const& m, int L, Rational const& eps, WindowSpec const& spec, int level,
                                int n_max, int horizon, int max_trials, BustPlacement placement) {
    WallSearch out;
    auto       cands = target_candidates(m, n_max);
    int const  E = m.num_edges();
    for (int e = 0; e < E; ++e) {
      if (cands[e].empty()) {
        out.blocking = "no periodic target on edge '" + m.graph().edges()[e].id + "'";
        return out;
      }
    }
    std::vector<size_t> idx(E, 0);
    auto                advance = [&] {
      for (int k = 0; k < E; ++k) {
        if (++idx[k] < cands[k].size()) {
          return true;
        }
        idx[k] = 0;
      }
      return false;
    };
    do {
      std::map<int, PeriodicOrbit> targets;
      for (int e = 0; e < E; ++e) {
        targets[e] = cands[e][idx[e]];
      }
      if (!admissible_targets(m, L, targets)) {
        continue;
      }
      auto bs = search_busts(m, targets, eps, L, horizon, 12, placement);
      if (!bs.found) {
        out.blocking = bs.blocking;
        continue;
      }
      if (out.trials++ >= max_trials) {
        out.blocking = "trial budget exhausted";
        return out;
      }
      auto w = assemble_walls(m, bs.system, spec);
      bool ok = true;
      for (int e = 0; e < E && ok; ++e) {
        int c = w.component_of_bust(TreeEdge{NormalForm(), e}, level);
        if (c < 0) {
          ok = false;
          out.blocking = "bust outside the window";
          break;
        }
        auto sep = check_separation(w, {c}, 1);
        ok = sep.verdict == "wall" && sep.same_side_busts && approximate_wall(w, {c}).is_tree;
        if (!ok) {
          out.blocking = "wall through '" + m.graph().edges()[e].id + "': " + sep.verdict;
        }
      }
      if (ok) {
        out.found = true;
        out.targets = std::move(targets);
        out.busts = std::move(bs.system);
        out.blocking.clear();
        return out;
      }
    } while (advance());
    return out;
  }

  CutSearch search_cut_wall(GraphMap const& m, int L, Rational const& eps, WindowSpec const& spec, int level,
                            TreeVertex const& a, TreeVertex const& b, int M, int n_max, int horizon,
                            int max_trials) {
    CutSearch out;
    auto      cands = target_candidates(m, n_max);
    int const E = m.num_edges();
    for (int e = 0; e < E; ++e) {
      if (cands[e].empty()) {
        out.blocking = "no periodic target on edge '" + m.graph().edges()[e].id + "'";
        return out;
      }
    }
    std::vector<size_t> idx(E, 0);
    auto                advance = [&] {
      for (int k = 0; k < E; ++k) {
        if (++idx[k] < cands[k].size()) {
          return true;
        }
        idx[k] = 0;
      }
      return false;
    };
    do {
      std::map<int, PeriodicOrbit> targets;
      for (int e = 0; e < E; ++e) {
        targets[e] = cands[e][idx[e]];
      }
      if (!admissible_targets(m, L, targets)) {
        continue;
      }
      auto bs = search_busts(m, targets, eps, L, horizon, 12, BustPlacement::centered);
      if (!bs.found) {
        out.blocking = bs.blocking;
        continue;
      }
      if (out.trials++ >= max_trials) {
        out.blocking = "trial budget exhausted";
        return out;
      }
      auto w = assemble_walls(m, bs.system, spec);
      auto la = window_line(w, a, level), lb = window_line(w, b, level);
      for (int e = 0; e < E; ++e) {
        for (int sign : {-1, 1}) {
          auto it = w.node_index.find(NodeKey{NodeKind::primary_end, level, TreeEdge{NormalForm(), e}, {}, -1, sign});
          if (it == w.node_index.end()) {
            continue;
          }
          int c = w.component_of_node[it->second];
          if (check_separation(w, {c}, 1).verdict != "wall") {
            out.blocking = "wall does not separate the window";
            continue;
          }
          auto sat = saturate_wall(w, c, M);
          try {
            bool ok = check_cut(w, sat, la, lb).verdict == "separated" && check_cut(w, sat, la).verdict == "same side"
                      && check_cut(w, sat, lb).verdict == "same side";
            if (!ok) {
              out.blocking = "lines not cut";
              continue;
            }
          } catch (InputError const& err) {
            out.blocking = err.what();
            continue;
          }
          out.found = true;
          out.targets = std::move(targets);
          out.busts = std::move(bs.system);
          out.edge = e;
          out.sign = sign;
          out.blocking.clear();
          return out;
        }
      }
    } while (advance());
    return out;
  }

}  // namespace flowcube
