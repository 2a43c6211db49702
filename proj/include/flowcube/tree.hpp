#pragma once

// The Bass-Serre tree T of a marked graph, handled lazily. Vertices are
// (canonical coset label, base vertex); the edge (g, e) runs from g.v_from
// to g.label(e).v_to, so edge stabilisers are trivial by construction.

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "flowcube/graph.hpp"
#include "flowcube/rational.hpp"

namespace flowcube {

  struct TreeVertex {
    NormalForm label;
    int        base = 0;
    bool       operator==(TreeVertex const&) const = default;
    auto       operator<=>(TreeVertex const&) const = default;
  };

  struct TreeEdge {
    NormalForm g;
    int        edge = 0;
    bool       operator==(TreeEdge const&) const = default;
    auto       operator<=>(TreeEdge const&) const = default;
  };

  // An edge traversed from source to target (dir +1) or backwards (dir -1).
  struct Step {
    TreeEdge edge;
    int      dir = 1;
    bool     operator==(Step const&) const = default;
    auto     operator<=>(Step const&) const = default;
  };

  // A directed germ: the edge seen from its source (from_end) or its target.
  struct Germ {
    TreeEdge edge;
    bool     from_end = true;
    bool     operator==(Germ const&) const = default;
    auto     operator<=>(Germ const&) const = default;
  };

  struct TreePoint {
    bool       on_vertex = true;
    TreeVertex vertex;  // valid when on_vertex
    TreeEdge   edge;    // valid otherwise, with 0 < t < 1
    Rational   t;

    static TreePoint at(TreeVertex v) {
      TreePoint p;
      p.vertex = std::move(v);
      return p;
    }

    bool operator==(TreePoint const& o) const {
      if (on_vertex != o.on_vertex) {
        return false;
      }
      return on_vertex ? vertex == o.vertex : (edge == o.edge && t == o.t);
    }
    bool operator<(TreePoint const& o) const {
      if (on_vertex != o.on_vertex) {
        return on_vertex;
      }
      if (on_vertex) {
        return vertex < o.vertex;
      }
      if (edge != o.edge) {
        return edge < o.edge;
      }
      return t < o.t;
    }
  };

  struct Path {
    TreeVertex        start;
    std::vector<Step> steps;
    size_t            length() const { return steps.size(); }
    bool              operator==(Path const&) const = default;
  };

  struct Decoration {
    NormalForm h;  // element of the vertex stabiliser (relative to the label)
    int        rep = 0;
  };

  struct TreeBall {
    TreeVertex                center;
    int                       radius = 0;
    int                       angle_cap = 0;
    std::vector<TreeVertex>   vertices;
    std::vector<int>          depth;
    std::vector<TreeEdge>     edges;
    std::map<TreeVertex, int> vertex_index;
    std::set<TreeEdge>        edge_set;

    bool contains(TreeVertex const& v) const { return vertex_index.count(v) != 0; }
    bool contains(TreeEdge const& e) const { return edge_set.count(e) != 0; }
  };

  class BassSerreTree {
   public:
    explicit BassSerreTree(std::shared_ptr<MarkedGraph const> graph);

    MarkedGraph const&                        graph() const { return *_graph; }
    std::shared_ptr<MarkedGraph const> const& graph_ptr() const { return _graph; }
    FreeProduct const&                        group() const { return _graph->group(); }

    TreeVertex vertex(NormalForm const& g, int base) const;
    TreeVertex base_vertex(int base) const { return vertex(NormalForm(), base); }
    bool       is_singular(TreeVertex const& v) const { return _graph->is_singular(v.base); }
    TreeVertex source(TreeEdge const& e) const;
    TreeVertex target(TreeEdge const& e) const;
    TreeVertex step_start(Step const& s) const { return s.dir > 0 ? source(s.edge) : target(s.edge); }
    TreeVertex step_end(Step const& s) const { return s.dir > 0 ? target(s.edge) : source(s.edge); }
    Germ       start_germ(Step const& s) const { return {s.edge, s.dir > 0}; }
    Germ       end_germ(Step const& s) const { return {s.edge, s.dir < 0}; }
    TreeVertex germ_vertex(Germ const& d) const { return d.from_end ? source(d.edge) : target(d.edge); }
    Step       germ_step(Germ const& d) const { return {d.edge, d.from_end ? 1 : -1}; }
    Step       reverse(Step const& s) const { return {s.edge, -s.dir}; }
    Path       reverse(Path const& p) const;
    TreeVertex end(Path const& p) const { return p.steps.empty() ? p.start : step_end(p.steps.back()); }

    TreeVertex act(NormalForm const& g, TreeVertex const& v) const;
    TreeEdge   act(NormalForm const& g, TreeEdge const& e) const;
    Step       act(NormalForm const& g, Step const& s) const { return {act(g, s.edge), s.dir}; }
    Germ       act(NormalForm const& g, Germ const& d) const { return {act(g, d.edge), d.from_end}; }
    TreePoint  act(NormalForm const& g, TreePoint const& p) const;
    Path       act(NormalForm const& g, Path const& p) const;

    // Canonical point on an edge; offsets 0 and 1 become vertices.
    TreePoint point(TreeEdge const& e, Rational const& t) const;

    // Removes backtracking; the result is the geodesic with the same ends.
    Path tighten(Path const& p) const;
    // Concatenation; the end of a must be the start of b.
    Path concat(Path const& a, Path const& b) const;
    bool is_reduced(Path const& p) const;
    bool is_connected(Path const& p) const;

    Path     geodesic(TreeVertex const& u, TreeVertex const& v) const;
    int      distance(TreeVertex const& u, TreeVertex const& v) const;
    Rational distance(TreePoint const& p, TreePoint const& q) const;

    Germ       germ_at(TreeVertex const& v, Decoration const& d) const;
    Decoration decorate(TreeVertex const& v, Germ const& d) const;
    int        angle(Germ const& a, Germ const& b) const;
    // Maximum turn angle over the interior vertices of a path.
    int        path_max_angle(Path const& p) const;

    std::optional<EllipticInfo> stabilizer(TreeVertex const& v) const;

    // Germs at v within angle cap of the incoming germ (or with decoration
    // length <= cap when there is no incoming germ).
    std::vector<Germ> germs(TreeVertex const& v, std::optional<Germ> const& incoming, int cap) const;
    TreeBall          expand_ball(TreeVertex const& center, int radius, int angle_cap) const;
    // Adds the closed neighbourhood structure of another ball or edge set.
    void              add_edge(TreeBall& ball, TreeEdge const& e) const;

   private:
    NormalForm rep_element(EdgeEnd end) const;
    Path       lift_root_path(int base) const;  // v_0 to v_base
    Path       path_from_root(NormalForm const& x) const;

    std::shared_ptr<MarkedGraph const> _graph;
    std::vector<Path>                  _letter_path;  // index: letter + n
    mutable std::map<std::pair<int, int>, std::vector<NormalForm>> _words;
  };

}  // namespace flowcube
