#include <algorithm>

#include "flowcube/errors.hpp"
#include "flowcube/walls.hpp"

namespace flowcube {

  bool same_orbit(TreePoint const& p, TreePoint const& q) {
    if (p.on_vertex != q.on_vertex) {
      return false;
    }
    return p.on_vertex ? p.vertex.base == q.vertex.base : (p.edge.edge == q.edge.edge && p.t == q.t);
  }

  std::vector<SecondaryBust> BustSystem::on_edge(int e) const {
    std::vector<SecondaryBust> out;
    for (auto const& s : secondary) {
      if (s.edge == e) {
        out.push_back(s);
      }
    }
    return out;
  }

  BustSystem make_bust_system(GraphMap const& m, int L, std::map<int, Interval> primary,
                              std::map<int, PeriodicOrbit> targets) {
    if (L < 1) {
      throw InputError("bust system: tunnel length must be positive");
    }
    for (auto const& [e, d] : primary) {
      if (e < 0 || e >= m.num_edges() || !(0 < d.lo && d.lo < d.hi && d.hi < 1)) {
        throw InputError("bust system: primary busts must be closed intervals inside open edges");
      }
    }
    BustSystem b;
    b.L = L;
    b.primary = std::move(primary);
    b.targets = std::move(targets);
    for (int e = 0; e < m.num_edges(); ++e) {
      for (auto const& pc : iterate_pieces(m, e, L)) {
        auto it = b.primary.find(pc.edge.edge);
        if (it == b.primary.end()) {
          continue;
        }
        Rational w = pc.hi - pc.lo;
        auto const& d = it->second;
        Interval    span = pc.dir > 0 ? Interval{pc.lo + d.lo * w, pc.lo + d.hi * w}
                                      : Interval{pc.hi - d.hi * w, pc.hi - d.lo * w};
        b.secondary.push_back({e, span, pc.edge, pc.dir});
      }
    }
    std::sort(b.secondary.begin(), b.secondary.end(), [](auto const& x, auto const& y) {
      return x.edge != y.edge ? x.edge < y.edge : x.span.lo < y.span.lo;
    });
    return b;
  }

  std::vector<SecondaryBust> secondaries_of(GraphMap const& m, BustSystem const& b, TreeEdge const& e) {
    auto out = b.on_edge(e.edge);
    if (!e.g.is_identity()) {
      auto h = m.phi.apply(e.g, b.L);
      for (auto& s : out) {
        s.target = m.tree->act(h, s.target);
      }
    }
    return out;
  }

  namespace {
    struct Segment {
      TreeEdge edge;
      Interval span;
    };

    // f^L of [a, b] on (1, e) as sub-intervals of tree edges, plus the tree
    // vertices it passes through.
    std::pair<std::vector<Segment>, std::vector<TreeVertex>>
    image_segments(GraphMap const& m, int e, Interval const& ab, int L) {
      std::vector<Segment>    segs;
      std::vector<TreeVertex> verts;
      for (auto const& pc : iterate_pieces(m, e, L)) {
        Rational lo = std::max(ab.lo, pc.lo), hi = std::min(ab.hi, pc.hi);
        if (hi <= lo) {
          continue;
        }
        Rational x = piece_offset(pc, lo), y = piece_offset(pc, hi);
        if (y < x) {
          std::swap(x, y);
        }
        segs.push_back({pc.edge, {x, y}});
        if (lo == pc.lo && pc.lo > ab.lo) {
          auto pt = m.tree->point(pc.edge, piece_offset(pc, pc.lo));
          verts.push_back(pt.vertex);
        }
      }
      return {segs, verts};
    }

    bool meets(Interval const& a, Interval const& b) { return a.lo <= b.hi && b.lo <= a.hi; }

    std::string show(Interval const& d) { return "[" + to_string(d.lo) + ", " + to_string(d.hi) + "]"; }
  }  // namespace

  BustReport verify_bust_conditions(GraphMap const& m, BustSystem const& b, int horizon) {
    auto const& T = *m.tree;
    auto const& g = m.graph();
    BustReport  rep;
    rep.horizon = horizon;
    if (b.primary.empty()) {
      rep.ok = true;
      rep.vacuous = true;
      return rep;
    }
    // (1) primary and secondary busts are disjoint
    for (auto const& s : b.secondary) {
      auto it = b.primary.find(s.edge);
      if (it != b.primary.end() && meets(it->second, s.span)) {
        Interval both{std::max(it->second.lo, s.span.lo), std::min(it->second.hi, s.span.hi)};
        rep.violations.push_back({1, "edge '" + g.edges()[s.edge].id + "': primary " + show(it->second)
                                         + " meets secondary " + show(s.span) + " in " + show(both)});
      }
    }
    // (3) rays from the endpoints avoid vertices; once a ray reaches a vertex
    // it stays on vertices, so the last level decides
    for (auto const& [e, d] : b.primary) {
      for (auto const& t : {d.lo, d.hi}) {
        auto p = map_point(m, T.point(TreeEdge{NormalForm(), e}, t), horizon * b.L);
        if (p.on_vertex) {
          rep.violations.push_back({3, "edge '" + g.edges()[e].id + "': the ray from " + to_string(t)
                                           + " meets a vertex within the horizon"});
        }
      }
    }
    // (5) no two points of f^L(d) in one orbit
    std::map<int, std::vector<Segment>> images;
    for (auto const& [e, d] : b.primary) {
      auto [segs, verts] = image_segments(m, e, d, b.L);
      images[e] = segs;
      bool clash = false;
      for (size_t i = 0; i < segs.size() && !clash; ++i) {
        for (size_t j = i + 1; j < segs.size() && !clash; ++j) {
          clash = segs[i].edge.edge == segs[j].edge.edge && meets(segs[i].span, segs[j].span);
        }
      }
      for (size_t i = 0; i < verts.size() && !clash; ++i) {
        for (size_t j = i + 1; j < verts.size() && !clash; ++j) {
          clash = verts[i].base == verts[j].base;
        }
      }
      if (clash) {
        rep.violations.push_back({5, "edge '" + g.edges()[e].id + "': the image of " + show(d)
                                         + " contains two points of one orbit"});
      }
    }
    // (6) disjoint images for targets with distinct images
    for (auto const& [e1, s1] : images) {
      for (auto const& [e2, s2] : images) {
        if (e2 <= e1) {
          continue;
        }
        auto t1 = b.targets.find(e1), t2 = b.targets.find(e2);
        if (t1 != b.targets.end() && t2 != b.targets.end()
            && map_point(m, t1->second.point, b.L) == map_point(m, t2->second.point, b.L)) {
          continue;
        }
        for (auto const& x : s1) {
          for (auto const& y : s2) {
            if (x.edge == y.edge && meets(x.span, y.span)) {
              rep.violations.push_back({6, "images of the busts on '" + g.edges()[e1].id + "' and '"
                                               + g.edges()[e2].id + "' meet"});
              goto next_pair;
            }
          }
        }
      next_pair:;
      }
    }
    rep.ok = rep.violations.empty();
    return rep;
  }

  BustSearch search_busts(GraphMap const& m, std::map<int, PeriodicOrbit> const& targets, Rational const& eps,
                          int L, int horizon, int budget, BustPlacement placement) {
    BustSearch out;
    if (eps <= 0) {
      throw InputError("search_busts: eps must be positive");
    }
    if (targets.empty()) {
      out.found = true;
      out.system = make_bust_system(m, L, {}, {});
      out.report = verify_bust_conditions(m, out.system, horizon);
      out.blocking = "no targets";
      return out;
    }
    // candidate offsets relative to the target, in units of the current width
    std::vector<std::pair<int, int>> kinds;
    if (placement == BustPlacement::centered) {
      kinds = {{-1, 1}};
    } else {
      kinds = {{0, 1}, {-1, 0}, {1, 2}, {-2, -1}};
    }
    for (int step = 0; step <= budget; ++step) {
      Rational w = eps / 2;
      for (int k = 0; k < step; ++k) {
        w /= 2;
      }
      for (auto const& [a, c] : kinds) {
        std::map<int, Interval> primary;
        bool                    fits = true;
        for (auto const& [e, o] : targets) {
          Interval d{o.offset + a * w, o.offset + c * w};
          if (!(d.lo > 0 && d.hi < 1)) {
            fits = false;
            break;
          }
          primary[e] = d;
        }
        if (!fits) {
          continue;
        }
        auto sys = make_bust_system(m, L, primary, targets);
        auto rep = verify_bust_conditions(m, sys, horizon);
        out.shrink_steps = step;
        if (rep.ok) {
          out.found = true;
          out.system = std::move(sys);
          out.report = std::move(rep);
          return out;
        }
        out.blocking = "condition (" + std::to_string(rep.violations.front().condition)
                       + "): " + rep.violations.front().detail;
        out.report = std::move(rep);
      }
    }
    return out;
  }

  std::vector<std::vector<PeriodicOrbit>> target_candidates(GraphMap const& m, int n_max) {
    std::vector<std::vector<PeriodicOrbit>> out(m.num_edges());
    for (int e = 0; e < m.num_edges(); ++e) {
      for (auto const& o : find_periodic_points(m, e, Rational(1), n_max).orbits) {
        if (o.point.on_vertex) {
          continue;
        }
        bool ray_ok = true;
        auto p = o.point;
        for (int j = 0; j < o.period && ray_ok; ++j) {
          p = map_point(m, p);
          ray_ok = !p.on_vertex;
        }
        if (ray_ok) {
          out[e].push_back(o);
        }
      }
      std::stable_sort(out[e].begin(), out[e].end(), [](auto const& x, auto const& y) {
        Rational dx = abs(x.offset - Rational(1, 2)), dy = abs(y.offset - Rational(1, 2));
        return x.period != y.period ? x.period < y.period : dx < dy;
      });
    }
    return out;
  }

  bool admissible_targets(GraphMap const& m, int L, std::map<int, PeriodicOrbit> const& targets) {
    for (auto const& [e1, o1] : targets) {
      auto img = map_point(m, o1.point, L);
      for (auto const& [e2, o2] : targets) {
        if (same_orbit(img, o2.point)) {
          return false;
        }
        if (e1 == e2) {
          continue;
        }
        auto q = o1.point;
        for (int j = 0; j < o1.period; ++j, q = map_point(m, q)) {
          if (same_orbit(q, o2.point)) {
            return false;
          }
        }
      }
    }
    return true;
  }

  std::map<int, PeriodicOrbit> choose_targets(GraphMap const& m, int L, int n_max) {
    auto                         cands = target_candidates(m, n_max);
    std::map<int, PeriodicOrbit> chosen;
    for (int e = 0; e < m.num_edges(); ++e) {
      for (auto const& o : cands[e]) {
        auto trial = chosen;
        trial[e] = o;
        if (admissible_targets(m, L, trial)) {
          chosen = std::move(trial);
          break;
        }
      }
    }
    return chosen;
  }

}  // namespace flowcube
