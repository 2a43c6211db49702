#include "flowcube/tree.hpp"

#include <algorithm>
#include <deque>

#include "flowcube/errors.hpp"

namespace flowcube {

  BassSerreTree::BassSerreTree(std::shared_ptr<MarkedGraph const> graph)
      : _graph(std::move(graph)) {
    if (!_graph->has_standard_marking()) {
      throw InputError("the tree needs a graph with a standard marking");
    }
    auto const& G = group();
    int const   n = G.num_generators();
    _letter_path.resize(2 * n + 1);
    for (int g = 0; g < n; ++g) {
      auto const s = G.generator(g);
      Path       p;
      int        factor = G.system().origin(g);
      if (factor < 0) {
        int        e = _graph->edge_of_free_generator(g);
        auto const& edge = _graph->edges()[e];
        p = lift_root_path(edge.from);
        p.steps.push_back({TreeEdge{NormalForm(), e}, 1});
        auto back = act(s, reverse(lift_root_path(edge.to)));
        p.steps.insert(p.steps.end(), back.steps.begin(), back.steps.end());
      } else {
        int v = _graph->vertex_of_factor(factor);
        p = lift_root_path(v);
        auto back = act(s, reverse(lift_root_path(v)));
        p.steps.insert(p.steps.end(), back.steps.begin(), back.steps.end());
      }
      p = tighten(p);
      _letter_path[n + g + 1] = p;
      _letter_path[n - g - 1] = act(G.invert(s), reverse(p));
    }
  }

  NormalForm BassSerreTree::rep_element(EdgeEnd end) const {
    if (end.from_end) {
      return NormalForm();
    }
    return group().invert(_graph->edges()[end.edge].label);
  }

  TreeVertex BassSerreTree::vertex(NormalForm const& g, int base) const {
    int f = _graph->vertices()[base].factor;
    return {f >= 0 ? group().coset_rep(g, f) : g, base};
  }

  TreeVertex BassSerreTree::source(TreeEdge const& e) const {
    return vertex(e.g, _graph->edges()[e.edge].from);
  }

  TreeVertex BassSerreTree::target(TreeEdge const& e) const {
    auto const& edge = _graph->edges()[e.edge];
    return vertex(group().multiply(e.g, edge.label), edge.to);
  }

  Path BassSerreTree::reverse(Path const& p) const {
    Path r;
    r.start = end(p);
    for (auto it = p.steps.rbegin(); it != p.steps.rend(); ++it) {
      r.steps.push_back(reverse(*it));
    }
    return r;
  }

  TreeVertex BassSerreTree::act(NormalForm const& g, TreeVertex const& v) const {
    return vertex(group().multiply(g, v.label), v.base);
  }

  TreeEdge BassSerreTree::act(NormalForm const& g, TreeEdge const& e) const {
    return {group().multiply(g, e.g), e.edge};
  }

  TreePoint BassSerreTree::act(NormalForm const& g, TreePoint const& p) const {
    if (p.on_vertex) {
      return TreePoint::at(act(g, p.vertex));
    }
    TreePoint q = p;
    q.edge = act(g, p.edge);
    return q;
  }

  Path BassSerreTree::act(NormalForm const& g, Path const& p) const {
    Path q;
    q.start = act(g, p.start);
    q.steps.reserve(p.steps.size());
    for (auto const& s : p.steps) {
      q.steps.push_back(act(g, s));
    }
    return q;
  }

  TreePoint BassSerreTree::point(TreeEdge const& e, Rational const& t) const {
    if (t < 0 || t > 1) {
      throw InputError("edge offset outside [0,1]");
    }
    if (t == 0) {
      return TreePoint::at(source(e));
    }
    if (t == 1) {
      return TreePoint::at(target(e));
    }
    TreePoint p;
    p.on_vertex = false;
    p.edge = e;
    p.t = t;
    return p;
  }

  Path BassSerreTree::tighten(Path const& p) const {
    Path out;
    out.start = p.start;
    for (auto const& s : p.steps) {
      if (!out.steps.empty() && out.steps.back().edge == s.edge && out.steps.back().dir == -s.dir) {
        out.steps.pop_back();
      } else {
        out.steps.push_back(s);
      }
    }
    return out;
  }

  Path BassSerreTree::concat(Path const& a, Path const& b) const {
    if (end(a) != b.start) {
      throw InputError("concat: paths do not meet");
    }
    Path out = a;
    out.steps.insert(out.steps.end(), b.steps.begin(), b.steps.end());
    return out;
  }

  bool BassSerreTree::is_reduced(Path const& p) const {
    for (size_t i = 1; i < p.steps.size(); ++i) {
      if (p.steps[i].edge == p.steps[i - 1].edge && p.steps[i].dir == -p.steps[i - 1].dir) {
        return false;
      }
    }
    return true;
  }

  bool BassSerreTree::is_connected(Path const& p) const {
    TreeVertex at = p.start;
    for (auto const& s : p.steps) {
      if (step_start(s) != at) {
        return false;
      }
      at = step_end(s);
    }
    return true;
  }

  Path BassSerreTree::lift_root_path(int base) const {
    Path p;
    p.start = base_vertex(0);
    for (auto [e, dir] : _graph->root_path(base)) {
      p.steps.push_back({TreeEdge{NormalForm(), e}, dir});
    }
    return p;
  }

  Path BassSerreTree::path_from_root(NormalForm const& x) const {
    auto const& G = group();
    int const   n = G.num_generators();
    Path        p;
    p.start = base_vertex(0);
    NormalForm prefix;
    for (Letter l : x.letters()) {
      auto piece = act(prefix, _letter_path[n + l]);
      for (auto const& s : piece.steps) {
        if (!p.steps.empty() && p.steps.back().edge == s.edge && p.steps.back().dir == -s.dir) {
          p.steps.pop_back();
        } else {
          p.steps.push_back(s);
        }
      }
      prefix = G.multiply(prefix, NormalForm({l}));
    }
    return p;
  }

  Path BassSerreTree::geodesic(TreeVertex const& u, TreeVertex const& v) const {
    auto const& G = group();
    Path        p = act(u.label, reverse(lift_root_path(u.base)));
    auto        mid = act(u.label, path_from_root(G.multiply(G.invert(u.label), v.label)));
    auto        tail = act(v.label, lift_root_path(v.base));
    p.steps.insert(p.steps.end(), mid.steps.begin(), mid.steps.end());
    p.steps.insert(p.steps.end(), tail.steps.begin(), tail.steps.end());
    p = tighten(p);
    p.start = u;
    return p;
  }

  int BassSerreTree::distance(TreeVertex const& u, TreeVertex const& v) const {
    return static_cast<int>(geodesic(u, v).length());
  }

  Rational BassSerreTree::distance(TreePoint const& p, TreePoint const& q) const {
    if (p.on_vertex && q.on_vertex) {
      return distance(p.vertex, q.vertex);
    }
    if (!p.on_vertex && !q.on_vertex && p.edge == q.edge) {
      return abs(p.t - q.t);
    }
    // endpoints with their distances to the point
    auto ends = [&](TreePoint const& x) {
      std::vector<std::pair<TreeVertex, Rational>> out;
      if (x.on_vertex) {
        out.emplace_back(x.vertex, Rational(0));
      } else {
        out.emplace_back(source(x.edge), x.t);
        out.emplace_back(target(x.edge), 1 - x.t);
      }
      return out;
    };
    Rational best(-1);
    for (auto const& [a, da] : ends(p)) {
      for (auto const& [b, db] : ends(q)) {
        Rational d = da + db + distance(a, b);
        if (best < 0 || d < best) {
          best = d;
        }
      }
    }
    return best;
  }

  Germ BassSerreTree::germ_at(TreeVertex const& v, Decoration const& d) const {
    auto const& end = _graph->ends_at(v.base)[d.rep];
    auto const& G = group();
    return {TreeEdge{G.multiply(v.label, d.h, rep_element(end)), end.edge}, end.from_end};
  }

  Decoration BassSerreTree::decorate(TreeVertex const& v, Germ const& d) const {
    int r = _graph->end_index(v.base, EdgeEnd{d.edge.edge, d.from_end});
    if (r < 0) {
      throw InputError("germ is not incident to the vertex");
    }
    auto const& G = group();
    auto h = G.multiply(G.invert(v.label), d.edge.g, G.invert(rep_element(_graph->ends_at(v.base)[r])));
    int  f = _graph->vertices()[v.base].factor;
    if (f < 0 ? !h.is_identity() : !G.in_factor(h, f)) {
      throw InputError("germ is not incident to the vertex");
    }
    return {h, r};
  }

  int BassSerreTree::angle(Germ const& a, Germ const& b) const {
    auto v = germ_vertex(a);
    if (germ_vertex(b) != v) {
      throw InputError("angle: germs at different vertices");
    }
    if (a == b) {
      return 0;
    }
    if (!is_singular(v)) {
      return 1;
    }
    auto const& G = group();
    auto        da = decorate(v, a);
    auto        db = decorate(v, b);
    int         len = static_cast<int>(G.multiply(G.invert(da.h), db.h).length());
    return len + (da.rep != db.rep ? 1 : 0);
  }

  int BassSerreTree::path_max_angle(Path const& p) const {
    int best = 0;
    for (size_t i = 1; i < p.steps.size(); ++i) {
      best = std::max(best, angle(end_germ(p.steps[i - 1]), start_germ(p.steps[i])));
    }
    return best;
  }

  std::optional<EllipticInfo> BassSerreTree::stabilizer(TreeVertex const& v) const {
    int f = _graph->vertices()[v.base].factor;
    if (f < 0) {
      return std::nullopt;
    }
    return EllipticInfo{f, v.label};
  }

  std::vector<Germ> BassSerreTree::germs(TreeVertex const&          v,
                                         std::optional<Germ> const& incoming,
                                         int                        cap) const {
    std::vector<Germ> out;
    int const         nreps = _graph->valence(v.base);
    int const         f = _graph->vertices()[v.base].factor;
    if (f < 0) {
      for (int r = 0; r < nreps; ++r) {
        out.push_back(germ_at(v, {NormalForm(), r}));
      }
      return out;
    }
    auto words = [&](int len) -> std::vector<NormalForm> const& {
      auto key = std::make_pair(f, len);
      auto it = _words.find(key);
      if (it == _words.end()) {
        it = _words.emplace(key, group().factor_words(f, std::max(len, 0))).first;
        if (len < 0) {
          it->second.clear();
        }
      }
      return it->second;
    };
    auto const& G = group();
    if (!incoming) {
      for (int r = 0; r < nreps; ++r) {
        for (auto const& h : words(cap)) {
          out.push_back(germ_at(v, {h, r}));
        }
      }
      return out;
    }
    auto d0 = decorate(v, *incoming);
    for (int r = 0; r < nreps; ++r) {
      for (auto const& k : words(cap - (r != d0.rep ? 1 : 0))) {
        out.push_back(germ_at(v, {G.multiply(d0.h, k), r}));
      }
    }
    return out;
  }

  void BassSerreTree::add_edge(TreeBall& ball, TreeEdge const& e) const {
    if (!ball.edge_set.insert(e).second) {
      return;
    }
    ball.edges.push_back(e);
    for (auto const& v : {source(e), target(e)}) {
      if (ball.vertex_index.emplace(v, static_cast<int>(ball.vertices.size())).second) {
        ball.vertices.push_back(v);
        ball.depth.push_back(-1);
      }
    }
  }

  TreeBall BassSerreTree::expand_ball(TreeVertex const& center, int radius, int angle_cap) const {
    if (radius < 0 || angle_cap < 1) {
      throw InputError("expand_ball: radius must be >= 0 and angle_cap >= 1");
    }
    TreeBall ball;
    ball.center = center;
    ball.radius = radius;
    ball.angle_cap = angle_cap;
    ball.vertices.push_back(center);
    ball.depth.push_back(0);
    ball.vertex_index[center] = 0;
    std::deque<std::pair<int, std::optional<Germ>>> todo;
    todo.emplace_back(0, std::nullopt);
    while (!todo.empty()) {
      auto [i, incoming] = todo.front();
      todo.pop_front();
      if (ball.depth[i] >= radius) {
        continue;
      }
      TreeVertex const v = ball.vertices[i];
      for (auto const& d : germs(v, incoming, angle_cap)) {
        if (incoming && d == *incoming) {
          continue;
        }
        if (!ball.edge_set.insert(d.edge).second) {
          continue;
        }
        ball.edges.push_back(d.edge);
        TreeVertex w = d.from_end ? target(d.edge) : source(d.edge);
        auto [it, fresh] = ball.vertex_index.emplace(w, static_cast<int>(ball.vertices.size()));
        if (fresh) {
          ball.vertices.push_back(w);
          ball.depth.push_back(ball.depth[i] + 1);
          todo.emplace_back(it->second, Germ{d.edge, !d.from_end});
        }
      }
    }
    return ball;
  }

}  // namespace flowcube
