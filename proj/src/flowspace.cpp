#include "flowcube/flowspace.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <tuple>

#include "flowcube/errors.hpp"

namespace flowcube {

  FlowPoint act(GraphMap const& m, NormalForm const& g, FlowPoint const& x) {
    return {x.level, m.tree->act(m.phi.apply(g, x.level), x.point)};
  }

  FlowPoint act(GraphMap const& m, FlowElement const& gamma, FlowPoint const& x) {
    return act(m, gamma.g, FlowPoint{x.level + gamma.k, x.point});
  }

  FlowSegmentChain flow_forward(GraphMap const& m, FlowPoint const& x, int k) {
    if (k < 0) {
      throw InputError("flow_forward: k must be non-negative");
    }
    FlowSegmentChain c{x, {}};
    FlowPoint        cur = x;
    for (int i = 0; i < k; ++i) {
      cur = {cur.level + 1, map_point(m, cur.point)};
      c.steps.push_back(cur);
    }
    return c;
  }

  TreeVertex singular_preimage(GraphMap const& m, TreeVertex const& v) {
    auto const& T = *m.tree;
    auto const& G = m.group();
    if (!T.is_singular(v)) {
      throw InputError("singular_preimage: vertex is not singular");
    }
    for (int c = 0; c < m.graph().num_vertices(); ++c) {
      auto const& img = m.vertex_images[c];
      if (m.graph().is_singular(c) && img.vertex == v.base) {
        auto h = m.phi.apply(G.multiply(v.label, G.invert(img.g)), -1);
        return T.vertex(h, c);
      }
    }
    throw InputError("singular_preimage: no singular vertex maps to this orbit");
  }

  PreimageResult preimages(GraphMap const& m, FlowPoint const& x) {
    auto const&    T = *m.tree;
    auto const&    G = m.group();
    auto const&    p = x.point;
    PreimageResult out;
    std::set<TreePoint> finite;
    std::set<TreePoint> reps;
    auto           lower = [&](NormalForm const& y) { return m.phi.apply(y, -1); };

    if (!p.on_vertex) {
      for (int e = 0; e < m.num_edges(); ++e) {
        auto const& img = m.edge_images[e];
        long const  l = static_cast<long>(img.size());
        for (long j = 0; j < l; ++j) {
          auto const& s = img[j];
          if (s.edge.edge != p.edge.edge) {
            continue;
          }
          auto     h = lower(G.multiply(p.edge.g, G.invert(s.edge.g)));
          Rational u = s.dir > 0 ? p.t : Rational(1 - p.t);
          finite.insert(T.point(TreeEdge{h, e}, (j + u) / l));
        }
      }
    } else {
      auto const& v = p.vertex;
      bool const  sing = T.is_singular(v);
      if (sing) {
        out.singular = singular_preimage(m, v);
        finite.insert(TreePoint::at(*out.singular));
      }
      auto record = [&](TreePoint q) {
        (sing ? reps : finite).insert(std::move(q));
      };
      for (int c = 0; c < m.graph().num_vertices(); ++c) {
        auto const& img = m.vertex_images[c];
        if (img.vertex != v.base || m.graph().is_singular(c)) {
          continue;
        }
        record(TreePoint::at(T.vertex(lower(G.multiply(v.label, G.invert(img.g))), c)));
      }
      for (int e = 0; e < m.num_edges(); ++e) {
        auto const& img = m.edge_images[e];
        long const  l = static_cast<long>(img.size());
        for (long j = 1; j < l; ++j) {
          auto w = T.step_start(img[j]);
          if (w.base != v.base) {
            continue;
          }
          auto h = lower(G.multiply(v.label, G.invert(w.label)));
          record(T.point(TreeEdge{h, e}, Rational(j, l)));
        }
      }
      for (auto const& r : reps) {
        out.families.push_back({r, *out.singular});
      }
    }
    for (auto const& q : finite) {
      if (!(map_point(m, q) == p)) {
        throw NumericalError("preimages: enumerated point does not map to the target");
      }
      out.points.push_back({x.level - 1, q});
    }
    for (auto const& f : out.families) {
      if (!(map_point(m, f.representative) == p)) {
        throw NumericalError("preimages: family representative does not map to the target");
      }
    }
    out.complete = true;
    out.certificate = out.families.empty()
                          ? "exhaustive: every step of every edge image and every vertex image matched"
                          : "exhaustive up to the stabiliser of the singular preimage";
    return out;
  }

  BackwardFlow backward_flow_tree(GraphMap const& m, FlowPoint const& x, int L) {
    if (L < 0) {
      throw InputError("backward_flow_tree: L must be non-negative");
    }
    BackwardFlow out;
    out.nodes.push_back({x, -1, 0});
    std::vector<int> frontier{0};
    for (int d = 1; d <= L; ++d) {
      std::vector<int> next;
      for (int i : frontier) {
        auto pre = preimages(m, out.nodes[i].point);
        if (!pre.families.empty()) {
          throw ResourceError("backward_flow_tree: infinite preimage at a singular vertex");
        }
        for (auto const& q : pre.points) {
          next.push_back(static_cast<int>(out.nodes.size()));
          out.nodes.push_back({q, i, d});
        }
      }
      frontier = std::move(next);
    }
    out.leaves = frontier;
    // Branches meet only where they merge: nodes are distinct per level and
    // every node maps to its parent.
    std::set<FlowPoint> seen;
    out.branches_disjoint = true;
    for (size_t i = 0; i < out.nodes.size(); ++i) {
      auto const& n = out.nodes[i];
      if (!seen.insert(n.point).second) {
        out.branches_disjoint = false;
      }
      if (n.parent >= 0 && !(map_point(m, n.point.point) == out.nodes[n.parent].point.point)) {
        out.branches_disjoint = false;
      }
    }
    return out;
  }

  PrincipalLine principal_flow_line(GraphMap const& m, TreeVertex const& v, int level, int lo, int hi) {
    auto const& T = *m.tree;
    if (!T.is_singular(v)) {
      throw InputError("principal_flow_line: seed vertex is not singular");
    }
    if (lo > level || hi < level) {
      throw ResourceError("principal_flow_line: level range does not contain the seed level");
    }
    PrincipalLine line{level, v, {}, {}};
    line.chain[level] = v;
    auto cur = v;
    for (int i = level + 1; i <= hi; ++i) {
      cur = map_vertex(m, cur);
      line.chain[i] = cur;
    }
    cur = v;
    for (int i = level - 1; i >= lo; --i) {
      cur = singular_preimage(m, cur);
      line.chain[i] = cur;
    }
    for (auto const& [i, w] : line.chain) {
      line.stabilizers[i] = *T.stabilizer(w);
    }
    return line;
  }

  bool PeriodicSearch::dense() const {
    return std::none_of(density.begin(), density.end(), [](int i) { return i < 0; });
  }

  namespace {
    // Smallest d with f^d(p) in the orbit G.p, together with the translating
    // element.
    std::pair<int, NormalForm> minimal_period(GraphMap const& m, TreePoint const& p, int n) {
      auto const& G = m.group();
      TreePoint   q = p;
      for (int d = 1; d <= n; ++d) {
        q = map_point(m, q);
        if (q.on_vertex != p.on_vertex) {
          continue;
        }
        if (p.on_vertex && q.vertex.base == p.vertex.base) {
          return {d, G.multiply(q.vertex.label, G.invert(p.vertex.label))};
        }
        if (!p.on_vertex && q.edge.edge == p.edge.edge && q.t == p.t) {
          return {d, G.multiply(q.edge.g, G.invert(p.edge.g))};
        }
      }
      throw NumericalError("periodic point lost its period");
    }
  }  // namespace

  PeriodicSearch find_periodic_points(GraphMap const& m, int edge, Rational const& eps, int n_max) {
    auto const& T = *m.tree;
    if (eps <= 0 || eps > 1 || n_max < 1) {
      throw InputError("find_periodic_points: need 0 < eps <= 1 and n_max >= 1");
    }
    std::map<Rational, PeriodicOrbit> found;
    TreeEdge const                    base{NormalForm(), edge};
    for (int n = 1; n <= n_max; ++n) {
      for (auto const& pc : iterate_pieces(m, edge, n)) {
        if (pc.edge.edge != edge) {
          continue;
        }
        Rational w = pc.hi - pc.lo;
        Rational t;
        if (pc.dir > 0) {
          if (w == 1) {
            continue;  // f^n is a translation of the whole edge
          }
          t = pc.lo / (1 - w);
        } else {
          t = pc.hi / (1 + w);
        }
        if (t < pc.lo || t > pc.hi || found.count(t)) {
          continue;
        }
        auto pt = T.point(base, t);
        if (!(map_point(m, pt, n) == T.act(pc.edge.g, pt))) {
          continue;  // the fixed point sits on a piece boundary of another branch
        }
        auto [d, g] = minimal_period(m, pt, n);
        found[t] = PeriodicOrbit{t, edge, pt, d, g, m.phi.apply(g, -d)};
      }
    }
    PeriodicSearch out;
    out.eps = eps;
    for (auto& [t, o] : found) {
      out.orbits.push_back(std::move(o));
    }
    for (Rational a = 0; a < 1; a += eps) {
      Rational b = std::min(Rational(a + eps), Rational(1));
      int      best = -1;
      for (int i = 0; i < static_cast<int>(out.orbits.size()); ++i) {
        auto const& o = out.orbits[i];
        if (o.offset >= a && o.offset <= b && (best < 0 || o.period < out.orbits[best].period)) {
          best = i;
        }
      }
      out.density.push_back(best);
    }
    return out;
  }

  PeriodicLine periodic_flow_line(GraphMap const& m, PeriodicOrbit const& o, int lo, int hi) {
    auto const& G = m.group();
    auto const& T = *m.tree;
    int const   n = o.period;
    if (lo > 0 || hi < 2 * n) {
      throw ResourceError("periodic_flow_line: window must contain levels 0 .. 2 * period");
    }
    PeriodicLine line;
    line.translation = {o.suspension, n};
    TreePoint cur = o.point;
    for (int j = 0; j <= hi; ++j) {
      line.points[j] = cur;
      cur = map_point(m, cur);
    }
    // gamma^-1 (i, p) = (i - n, phi^(i-n)(g)^-1 p)
    for (int j = -1; j >= lo; --j) {
      int       k = (-j + n - 1) / n;
      int       i = j + k * n;
      TreePoint q = line.points.at(i);
      for (int r = 0; r < k; ++r) {
        q = T.act(G.invert(m.phi.apply(o.g, i - n)), q);
        i -= n;
      }
      line.points[j] = q;
    }
    line.consistent = true;
    for (int j = lo; j < hi; ++j) {
      if (!(map_point(m, line.points.at(j)) == line.points.at(j + 1))) {
        line.consistent = false;
      }
    }
    line.translation_ok = true;
    TreePoint direct = o.point;
    for (int k = 0; k <= 2 * n; ++k) {
      if (k >= n) {
        auto moved = act(m, line.translation, FlowPoint{k - n, line.points.at(k - n)});
        if (moved.level != k || !(moved.point == direct)) {
          line.translation_ok = false;
        }
      }
      direct = map_point(m, direct);
    }
    return line;
  }

  namespace {
    std::vector<std::pair<TreeVertex, Rational>> exits(BassSerreTree const& T, TreePoint const& p) {
      if (p.on_vertex) {
        return {{p.vertex, Rational(0)}};
      }
      return {{T.source(p.edge), p.t}, {T.target(p.edge), Rational(1 - p.t)}};
    }
  }  // namespace

  bool segment_is_legal(GraphMap const& m, TreePoint const& p, TreePoint const& q) {
    auto const& T = *m.tree;
    if (p == q || (!p.on_vertex && !q.on_vertex && p.edge == q.edge)) {
      return true;
    }
    if (!p.on_vertex && q.on_vertex && (T.source(p.edge) == q.vertex || T.target(p.edge) == q.vertex)) {
      return true;
    }
    if (p.on_vertex && !q.on_vertex && (T.source(q.edge) == p.vertex || T.target(q.edge) == p.vertex)) {
      return true;
    }
    // Pick the exits realising the distance; the germs along the way are
    // the partial edges at both ends and the geodesic between the exits.
    std::optional<Rational> best;
    TreeVertex              a, b;
    for (auto const& [u, du] : exits(T, p)) {
      for (auto const& [v, dv] : exits(T, q)) {
        Rational d = du + dv + T.distance(u, v);
        if (!best || d < *best) {
          best = d;
          a = u;
          b = v;
        }
      }
    }
    std::vector<Step> steps;
    if (!p.on_vertex) {
      steps.push_back({p.edge, T.target(p.edge) == a ? 1 : -1});
    }
    for (auto const& s : T.geodesic(a, b).steps) {
      steps.push_back(s);
    }
    if (!q.on_vertex) {
      steps.push_back({q.edge, T.source(q.edge) == b ? 1 : -1});
    }
    for (size_t k = 0; k + 1 < steps.size(); ++k) {
      if (!is_legal_turn(m, T.end_germ(steps[k]), T.start_germ(steps[k + 1]))) {
        return false;
      }
    }
    return true;
  }

  DivergenceProfile divergence_profile(GraphMap const& m, FlowPoint const& x, FlowPoint const& y, int N) {
    if (x.level != y.level) {
      throw InputError("divergence_profile: points must lie in the same level");
    }
    auto const&       T = *m.tree;
    DivergenceProfile out;
    out.legal = segment_is_legal(m, x.point, y.point);
    TreePoint p = x.point, q = y.point;
    for (int k = 0; k <= N; ++k) {
      out.distances.push_back(T.distance(p, q));
      p = map_point(m, p);
      q = map_point(m, q);
    }
    out.monotone = std::is_sorted(out.distances.begin(), out.distances.end());
    return out;
  }

  Path iterate_path(GraphMap const& m, Path const& p, int n) {
    Path out = p;
    for (int i = 0; i < n; ++i) {
      out = map_path(m, out);
    }
    return out;
  }

  int FlowWindow::num_vertices() const {
    int n = 0;
    for (auto const& b : levels) {
      n += static_cast<int>(b.vertices.size());
    }
    return n;
  }

  FlowWindow build_window(GraphMap const& m, WindowSpec const& spec) {
    auto const& T = *m.tree;
    if (spec.hi < spec.lo || spec.scale < 1 || spec.radius < 0 || spec.angle_cap < 1) {
      throw InputError("build_window: need lo <= hi, scale >= 1, radius >= 0, angle_cap >= 1");
    }
    FlowWindow w;
    w.lo = spec.lo;
    w.hi = spec.hi;
    w.scale = spec.scale;
    TreeVertex c = spec.center;
    w.levels.push_back(T.expand_ball(c, spec.radius, spec.angle_cap));
    for (int j = spec.lo; j < spec.hi; ++j) {
      for (int k = 0; k < spec.scale; ++k) {
        c = map_vertex(m, c);
      }
      TreeBall next = T.expand_ball(c, spec.radius, spec.angle_cap);
      auto const& cur = w.levels.back();
      for (auto const& e : cur.edges) {
        Path img = iterate_path(m, Path{T.source(e), {{e, 1}}}, spec.scale);
        for (auto const& s : img.steps) {
          T.add_edge(next, s.edge);
        }
        w.rectangles.push_back({j, e, std::move(img)});
      }
      for (auto const& v : cur.vertices) {
        TreeVertex u = v;
        for (int k = 0; k < spec.scale; ++k) {
          u = map_vertex(m, u);
        }
        if (!next.contains(u)) {
          throw NumericalError("build_window: vertex image missing from the next level");
        }
        w.horizontal.push_back({j, v, u});
      }
      w.levels.push_back(std::move(next));
    }
    return w;
  }

  std::map<std::pair<int, TreeVertex>, int>
  skeleton_distances(BassSerreTree const& T, FlowWindow const& w, int level, TreeVertex const& v) {
    using Node = std::pair<int, TreeVertex>;
    std::map<Node, std::vector<Node>> adj;
    for (int j = w.lo; j <= w.hi; ++j) {
      for (auto const& e : w.at(j).edges) {
        Node a{j, T.source(e)}, b{j, T.target(e)};
        adj[a].push_back(b);
        adj[b].push_back(a);
      }
    }
    for (auto const& h : w.horizontal) {
      Node a{h.level, h.from}, b{h.level + 1, h.to};
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    std::map<Node, int> dist{{{level, v}, 0}};
    std::deque<Node>    q{{level, v}};
    while (!q.empty()) {
      auto x = q.front();
      q.pop_front();
      for (auto const& y : adj[x]) {
        if (dist.emplace(y, dist[x] + 1).second) {
          q.push_back(y);
        }
      }
    }
    return dist;
  }

  bool check_rho(GraphMap const& m, FlowWindow const& wl, FlowWindow const& w1) {
    if (w1.scale != 1 || w1.lo > wl.lo * wl.scale || w1.hi < wl.hi * wl.scale) {
      return false;
    }
    std::set<std::tuple<int, TreeVertex, TreeVertex>> steps;
    for (auto const& h : w1.horizontal) {
      steps.insert({h.level, h.from, h.to});
    }
    for (auto const& h : wl.horizontal) {
      TreeVertex u = h.from;
      int        i = h.level * wl.scale;
      for (int k = 0; k < wl.scale; ++k, ++i) {
        TreeVertex next = map_vertex(m, u);
        if (!steps.count({i, u, next})) {
          return false;
        }
        u = next;
      }
      if (u != h.to) {
        return false;
      }
    }
    return true;
  }

}  // namespace flowcube
