#pragma once

// The quotient graph T/G of a Bass-Serre tree for a free product, with a
// standard marking: the edges with trivial label form a spanning tree and
// every other edge is labelled by a distinct free generator.

#include <memory>
#include <string>
#include <vector>

#include "flowcube/freeprod.hpp"

namespace flowcube {

  struct GraphVertex {
    std::string id;
    int         factor = -1;  // -1 for a free vertex
  };

  struct GraphEdge {
    std::string id;
    int         from = 0;
    int         to = 0;
    NormalForm  label;  // lift of this edge runs from v_from to label * v_to
  };

  // An edge end at a vertex; the orbit representatives of germs.
  struct EdgeEnd {
    int  edge;
    bool from_end;
    bool operator==(EdgeEnd const&) const = default;
  };

  struct ValidationReport {
    bool                     ok = true;
    std::vector<std::string> problems;

    void fail(std::string why) {
      ok = false;
      problems.push_back(std::move(why));
    }
  };

  class MarkedGraph {
   public:
    MarkedGraph(std::shared_ptr<FreeProduct const> group,
                std::vector<GraphVertex>           vertices,
                std::vector<GraphEdge>             edges);

    // Labels are assigned automatically: a breadth-first spanning tree gets
    // trivial labels and the remaining edges take the free generators in order.
    static MarkedGraph with_standard_marking(std::shared_ptr<FreeProduct const> group,
                                             std::vector<GraphVertex>           vertices,
                                             std::vector<GraphEdge>             edges);

    FreeProduct const&                        group() const { return *_group; }
    std::shared_ptr<FreeProduct const> const& group_ptr() const { return _group; }
    std::vector<GraphVertex> const&           vertices() const { return _vertices; }
    std::vector<GraphEdge> const&             edges() const { return _edges; }
    int num_vertices() const { return static_cast<int>(_vertices.size()); }
    int num_edges() const { return static_cast<int>(_edges.size()); }

    int vertex_index(std::string_view id) const;  // -1 if unknown
    int edge_index(std::string_view id) const;
    // Singular vertex carrying factor i, or -1.
    int vertex_of_factor(int factor) const;

    bool is_singular(int v) const { return _vertices[v].factor >= 0; }
    // Germ orbit representatives at v: from-ends first, then to-ends, by edge.
    std::vector<EdgeEnd> const& ends_at(int v) const { return _ends[v]; }
    int valence(int v) const { return static_cast<int>(_ends[v].size()); }
    int end_index(int v, EdgeEnd end) const;

    // Spanning tree path from the root vertex 0 to v as (edge, dir) pairs.
    // Empty vectors if the marking is not standard.
    std::vector<std::pair<int, int>> const& root_path(int v) const { return _root_path[v]; }
    bool has_standard_marking() const { return _standard; }
    // Free generator labelling a non-tree edge, or -1.
    int free_generator_of_edge(int e) const { return _edge_generator[e]; }
    int edge_of_free_generator(int g) const;

   private:
    void index();

    std::shared_ptr<FreeProduct const>            _group;
    std::vector<GraphVertex>                      _vertices;
    std::vector<GraphEdge>                        _edges;
    std::vector<std::vector<EdgeEnd>>             _ends;
    std::vector<std::vector<std::pair<int, int>>> _root_path;
    std::vector<int>                              _edge_generator;
    bool                                          _standard = false;
  };

  ValidationReport validate_marked_graph(MarkedGraph const& g);

}  // namespace flowcube
