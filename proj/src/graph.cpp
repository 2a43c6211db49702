#include "flowcube/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>

#include "flowcube/errors.hpp"

namespace flowcube {

  MarkedGraph::MarkedGraph(std::shared_ptr<FreeProduct const> group,
                           std::vector<GraphVertex>           vertices,
                           std::vector<GraphEdge>             edges)
      : _group(std::move(group)), _vertices(std::move(vertices)), _edges(std::move(edges)) {
    if (_vertices.empty()) {
      throw InputError("graph has no vertices");
    }
    std::set<std::string> ids;
    for (auto const& v : _vertices) {
      if (!ids.insert(v.id).second) {
        throw InputError("duplicate vertex id '" + v.id + "'");
      }
      if (v.factor >= _group->system().num_factors()) {
        throw InputError("vertex '" + v.id + "' has an unknown mark");
      }
    }
    ids.clear();
    for (auto const& e : _edges) {
      if (!ids.insert(e.id).second) {
        throw InputError("duplicate edge id '" + e.id + "'");
      }
      if (e.from < 0 || e.from >= num_vertices() || e.to < 0 || e.to >= num_vertices()) {
        throw InputError("edge '" + e.id + "' has an endpoint out of range");
      }
    }
    index();
  }

  MarkedGraph MarkedGraph::with_standard_marking(std::shared_ptr<FreeProduct const> group,
                                                 std::vector<GraphVertex>           vertices,
                                                 std::vector<GraphEdge>             edges) {
    std::vector<bool> seen(vertices.size(), false);
    std::vector<bool> in_tree(edges.size(), false);
    std::queue<int>   todo;
    seen[0] = true;
    todo.push(0);
    while (!todo.empty()) {
      int v = todo.front();
      todo.pop();
      for (size_t e = 0; e < edges.size(); ++e) {
        int w = -1;
        if (edges[e].from == v) {
          w = edges[e].to;
        } else if (edges[e].to == v) {
          w = edges[e].from;
        }
        if (w >= 0 && !seen[w]) {
          seen[w] = true;
          in_tree[e] = true;
          todo.push(w);
        }
      }
    }
    auto const& free = group->system().free_part_generators();
    size_t      next = 0;
    for (size_t e = 0; e < edges.size(); ++e) {
      if (in_tree[e]) {
        edges[e].label = NormalForm();
      } else if (next < free.size()) {
        edges[e].label = group->generator(free[next++]);
      }
    }
    return MarkedGraph(std::move(group), std::move(vertices), std::move(edges));
  }

  void MarkedGraph::index() {
    _ends.assign(_vertices.size(), {});
    for (int e = 0; e < num_edges(); ++e) {
      _ends[_edges[e].from].push_back({e, true});
    }
    for (int e = 0; e < num_edges(); ++e) {
      _ends[_edges[e].to].push_back({e, false});
    }
    // Standard marking: trivially labelled edges form a spanning tree and
    // the rest are labelled by distinct free generators.
    _edge_generator.assign(_edges.size(), -1);
    _root_path.assign(_vertices.size(), {});
    _standard = true;
    std::set<int> used;
    int           tree_edges = 0;
    for (int e = 0; e < num_edges(); ++e) {
      auto const& lab = _edges[e].label;
      if (lab.is_identity()) {
        ++tree_edges;
        continue;
      }
      if (lab.length() != 1 || lab.letters()[0] < 0
          || _group->origin(lab.letters()[0]) != -1) {
        _standard = false;
        continue;
      }
      int g = generator_of(lab.letters()[0]);
      if (!used.insert(g).second) {
        _standard = false;
      }
      _edge_generator[e] = g;
    }
    if (tree_edges != num_vertices() - 1
        || static_cast<int>(used.size()) != _group->system().free_rank()) {
      _standard = false;
    }
    std::vector<bool> seen(_vertices.size(), false);
    std::queue<int>   todo;
    seen[0] = true;
    todo.push(0);
    int reached = 1;
    while (!todo.empty()) {
      int v = todo.front();
      todo.pop();
      for (auto const& end : _ends[v]) {
        auto const& edge = _edges[end.edge];
        if (!edge.label.is_identity()) {
          continue;
        }
        int w = end.from_end ? edge.to : edge.from;
        if (!seen[w]) {
          seen[w] = true;
          ++reached;
          _root_path[w] = _root_path[v];
          _root_path[w].emplace_back(end.edge, end.from_end ? 1 : -1);
          todo.push(w);
        }
      }
    }
    if (reached != num_vertices()) {
      _standard = false;
    }
    if (!_standard) {
      for (auto& p : _root_path) {
        p.clear();
      }
    }
  }

  int MarkedGraph::vertex_index(std::string_view id) const {
    for (int v = 0; v < num_vertices(); ++v) {
      if (_vertices[v].id == id) {
        return v;
      }
    }
    return -1;
  }

  int MarkedGraph::edge_index(std::string_view id) const {
    for (int e = 0; e < num_edges(); ++e) {
      if (_edges[e].id == id) {
        return e;
      }
    }
    return -1;
  }

  int MarkedGraph::vertex_of_factor(int factor) const {
    for (int v = 0; v < num_vertices(); ++v) {
      if (_vertices[v].factor == factor) {
        return v;
      }
    }
    return -1;
  }

  int MarkedGraph::end_index(int v, EdgeEnd end) const {
    auto const& ends = _ends[v];
    auto        it = std::find(ends.begin(), ends.end(), end);
    return it == ends.end() ? -1 : static_cast<int>(it - ends.begin());
  }

  int MarkedGraph::edge_of_free_generator(int g) const {
    for (int e = 0; e < num_edges(); ++e) {
      if (_edge_generator[e] == g) {
        return e;
      }
    }
    return -1;
  }

  ValidationReport validate_marked_graph(MarkedGraph const& g) {
    ValidationReport rep;
    auto const&      fs = g.group().system();

    // connectivity
    std::vector<int> parent(g.num_vertices());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) {
        x = parent[x] = parent[parent[x]];
      }
      return x;
    };
    for (auto const& e : g.edges()) {
      parent[find(e.from)] = find(e.to);
    }
    for (int v = 1; v < g.num_vertices(); ++v) {
      if (find(v) != find(0)) {
        rep.fail("graph is disconnected: vertex '" + g.vertices()[v].id + "' unreachable");
        break;
      }
    }
    for (int i = 0; i < fs.num_factors(); ++i) {
      int count = 0;
      for (auto const& v : g.vertices()) {
        count += v.factor == i;
      }
      if (count != 1) {
        rep.fail("factor '" + fs.factors()[i].id + "' marks " + std::to_string(count)
                 + " vertices (need exactly one)");
      }
    }
    for (int v = 0; v < g.num_vertices(); ++v) {
      if (!g.is_singular(v) && g.valence(v) == 2) {
        rep.fail("free vertex '" + g.vertices()[v].id + "' has valence 2");
      }
      if (!g.is_singular(v) && g.valence(v) == 1) {
        rep.fail("free vertex '" + g.vertices()[v].id + "' has valence 1");
      }
    }
    if (g.num_edges() < 2) {
      rep.fail("fundamental domain has fewer than two edges");
    }
    int rank = g.num_edges() - g.num_vertices() + 1;
    if (rank != fs.free_rank()) {
      rep.fail("graph has first Betti number " + std::to_string(rank) + " but free_rank is "
               + std::to_string(fs.free_rank()));
    }
    if (!g.has_standard_marking()) {
      rep.fail("marking is not standard: trivially labelled edges must form a spanning tree "
               "and the other edges must carry distinct free generators");
    }
    return rep;
  }

}  // namespace flowcube
