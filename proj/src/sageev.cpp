#include "flowcube/sageev.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "flowcube/errors.hpp"

namespace flowcube {

  void validate_wallspace(FiniteWallspace const& ws) {
    if (ws.points <= 0 || ws.base < 0 || ws.base >= ws.points) {
      throw InputError("wallspace: no points or bad base point");
    }
    for (int w = 0; w < ws.num_walls(); ++w) {
      auto const& s = ws.sides[w];
      if (static_cast<int>(s.size()) != ws.points) {
        throw InputError("wallspace: wall " + std::to_string(w) + " has the wrong number of sides");
      }
      bool neg = false, pos = false;
      for (int x : s) {
        if (x != -1 && x != 1) {
          throw InputError("wallspace: sides must be -1 or +1");
        }
        (x < 0 ? neg : pos) = true;
      }
      if (!neg || !pos) {
        throw InputError("wallspace: wall " + std::to_string(w) + " has an empty side");
      }
      for (auto const& [a, b] : ws.edges) {
        if (s.at(a) != s.at(b)) {
          throw InputError("wallspace: carrier edge " + std::to_string(a) + "-" + std::to_string(b)
                           + " crosses wall " + std::to_string(w));
        }
      }
    }
  }

  FiniteWallspace crossing_wallspace(int n) {
    if (n < 1 || n > 16) {
      throw InputError("crossing_wallspace: n must be in 1..16");
    }
    FiniteWallspace ws;
    ws.points = 1 << n;
    ws.sides.assign(n, std::vector<int>(ws.points));
    for (int w = 0; w < n; ++w) {
      ws.wall_names.push_back("h" + std::to_string(w));
      for (int p = 0; p < ws.points; ++p) {
        ws.sides[w][p] = (p >> w) & 1 ? 1 : -1;
      }
    }
    for (int p = 0; p < ws.points; ++p) {
      ws.point_names.push_back(std::to_string(p));
    }
    return ws;
  }

  FiniteWallspace tree_wallspace(int vertices, std::vector<std::pair<int, int>> const& edges) {
    if (static_cast<int>(edges.size()) != vertices - 1) {
      throw InputError("tree_wallspace: a tree on n vertices has n - 1 edges");
    }
    std::vector<std::vector<int>> adj(vertices);
    for (auto const& [a, b] : edges) {
      adj.at(a).push_back(b);
      adj.at(b).push_back(a);
    }
    // n - 1 edges and connected
    std::vector<char> seen(vertices, 0);
    std::deque<int>   q{0};
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
      int x = q.front();
      q.pop_front();
      for (int y : adj[x]) {
        if (!seen[y]) {
          seen[y] = 1;
          ++reached;
          q.push_back(y);
        }
      }
    }
    if (reached != vertices) {
      throw InputError("tree_wallspace: the edges do not form a tree");
    }
    FiniteWallspace ws;
    ws.points = vertices;
    for (int v = 0; v < vertices; ++v) {
      ws.point_names.push_back(std::to_string(v));
    }
    for (auto const& [a, b] : edges) {
      // the side of b: everything reached from b without crossing the edge
      std::vector<int> side(vertices, -1);
      std::deque<int>  q{b};
      side[b] = 1;
      while (!q.empty()) {
        int x = q.front();
        q.pop_front();
        for (int y : adj[x]) {
          if (side[y] < 0 && !(x == b && y == a)) {
            side[y] = 1;
            q.push_back(y);
          }
        }
      }
      ws.sides.push_back(std::move(side));
      ws.wall_names.push_back(std::to_string(a) + "-" + std::to_string(b));
    }
    return ws;
  }

  FiniteWallspace window_wallspace(WallComplex const& w, std::vector<std::vector<int>> const& walls) {
    std::vector<SeparationReport> reps;
    for (auto const& comps : walls) {
      reps.push_back(check_separation(w, comps));
      if (reps.back().verdict != "wall") {
        throw InputError("window_wallspace: a wall family does not separate the window");
      }
    }
    std::vector<int> carrier;
    std::map<int, int> index;
    for (int r = 0; r < static_cast<int>(w.regions.size()); ++r) {
      bool definite = true;
      for (auto const& rep : reps) {
        int s = rep.side_of_region(r);
        definite = definite && (s == -1 || s == 1);
      }
      if (definite) {
        index[r] = static_cast<int>(carrier.size());
        carrier.push_back(r);
      }
    }
    FiniteWallspace ws;
    ws.points = static_cast<int>(carrier.size());
    for (int r : carrier) {
      auto const& k = w.regions[r].key;
      ws.point_names.push_back("region " + std::to_string(static_cast<int>(k.kind)) + "@" + std::to_string(k.level));
    }
    for (auto const& [a, b] : w.openings) {
      auto ia = index.find(a), ib = index.find(b);
      if (ia != index.end() && ib != index.end()) {
        ws.edges.push_back({ia->second, ib->second});
      }
    }
    // walls inducing one bipartition of the carrier are merged
    std::set<std::vector<int>> seen;
    for (size_t i = 0; i < reps.size(); ++i) {
      std::vector<int> side;
      for (int r : carrier) {
        side.push_back(reps[i].side_of_region(r));
      }
      auto flipped = side;
      for (int& x : flipped) {
        x = -x;
      }
      if (seen.count(side) || seen.count(flipped)) {
        continue;
      }
      seen.insert(side);
      ws.sides.push_back(std::move(side));
      ws.wall_names.push_back("W" + std::to_string(i));
    }
    validate_wallspace(ws);
    return ws;
  }

  int DualCubeComplex::dimension() const {
    int d = edges.empty() ? 0 : 1;
    for (auto const& c : cubes) {
      d = std::max(d, static_cast<int>(c.walls.size()));
    }
    return d;
  }

  std::vector<std::vector<int>> DualCubeComplex::adjacency() const {
    std::vector<std::vector<int>> adj(vertices.size());
    for (auto const& e : edges) {
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
    }
    return adj;
  }

  DualCubeComplex build_dual(FiniteWallspace const& ws, DualOptions const& opt) {
    validate_wallspace(ws);
    int n = ws.num_walls();
    if (n > opt.wall_cap) {
      throw ResourceError("build_dual: " + std::to_string(n) + " walls exceed the cap of "
                          + std::to_string(opt.wall_cap));
    }
    // halfspace (w, s) as a bitset of points
    int                                nwords = (ws.points + 63) / 64;
    std::vector<std::vector<uint64_t>> half(2 * n, std::vector<uint64_t>(nwords, 0));
    for (int w = 0; w < n; ++w) {
      for (int p = 0; p < ws.points; ++p) {
        half[2 * w + (ws.sides[w][p] > 0)][p / 64] |= uint64_t(1) << (p % 64);
      }
    }
    auto hs = [](int w, int s) { return 2 * w + (s > 0); };
    std::vector<std::vector<char>> meets(2 * n, std::vector<char>(2 * n, 0));
    for (int a = 0; a < 2 * n; ++a) {
      for (int b = 0; b < 2 * n; ++b) {
        for (int k = 0; k < nwords && !meets[a][b]; ++k) {
          meets[a][b] = (half[a][k] & half[b][k]) != 0;
        }
      }
    }
    auto consistent_flip = [&](std::vector<int> const& o, int w) {
      int s = -o[w];
      for (int u = 0; u < n; ++u) {
        if (u != w && !meets[hs(w, s)][hs(u, o[u])]) {
          return false;
        }
      }
      return true;
    };

    DualCubeComplex                 cc;
    cc.walls = n;
    cc.max_dim = opt.dim_cap;
    std::map<std::vector<int>, int> id;
    auto principal_of = [&](int p) {
      std::vector<int> o(n);
      for (int w = 0; w < n; ++w) {
        o[w] = ws.sides[w][p];
      }
      return o;
    };
    auto start = principal_of(ws.base);
    id[start] = 0;
    cc.vertices.push_back(start);
    std::vector<std::vector<int>> nbr;  // nbr[v][w]: vertex across wall w or -1
    for (size_t v = 0; v < cc.vertices.size(); ++v) {
      nbr.emplace_back(n, -1);
      for (int w = 0; w < n; ++w) {
        auto o = cc.vertices[v];
        if (!consistent_flip(o, w)) {
          continue;
        }
        o[w] = -o[w];
        auto [it, fresh] = id.emplace(o, static_cast<int>(cc.vertices.size()));
        if (fresh) {
          cc.vertices.push_back(o);
        }
        nbr[v][w] = it->second;
        if (cc.vertices[v][w] < 0) {
          cc.edges.push_back({static_cast<int>(v), it->second, w});
        }
      }
    }
    for (int p = 0; p < ws.points; ++p) {
      auto it = id.find(principal_of(p));
      cc.principal.push_back(it == id.end() ? -1 : it->second);
    }
    // cubes at their all-negative corner
    for (int v = 0; v < static_cast<int>(cc.vertices.size()); ++v) {
      std::vector<int> up;
      for (int w = 0; w < n; ++w) {
        if (cc.vertices[v][w] < 0 && nbr[v][w] >= 0) {
          up.push_back(w);
        }
      }
      int k = static_cast<int>(up.size());
      if (k > 20) {
        throw ResourceError("build_dual: vertex degree too large for cube enumeration");
      }
      for (uint32_t mask = 0; mask < (uint32_t(1) << k); ++mask) {
        int dim = std::popcount(mask);
        if (dim < 2 || dim > opt.dim_cap) {
          continue;
        }
        std::vector<int> ws_in;
        for (int j = 0; j < k; ++j) {
          if (mask >> j & 1) {
            ws_in.push_back(up[j]);
          }
        }
        bool full = true;
        for (uint32_t sub = 1; sub < (uint32_t(1) << dim) && full; ++sub) {
          auto o = cc.vertices[v];
          for (int j = 0; j < dim; ++j) {
            if (sub >> j & 1) {
              o[ws_in[j]] = 1;
            }
          }
          full = id.count(o) != 0;
        }
        if (full) {
          cc.cubes.push_back({v, ws_in});
        }
      }
    }
    return cc;
  }

  namespace {
    std::vector<std::vector<int>> all_distances(std::vector<std::vector<int>> const& adj) {
      int                           n = static_cast<int>(adj.size());
      std::vector<std::vector<int>> d(n, std::vector<int>(n, -1));
      for (int s = 0; s < n; ++s) {
        std::deque<int> q{s};
        d[s][s] = 0;
        while (!q.empty()) {
          int x = q.front();
          q.pop_front();
          for (int y : adj[x]) {
            if (d[s][y] < 0) {
              d[s][y] = d[s][x] + 1;
              q.push_back(y);
            }
          }
        }
      }
      return d;
    }

    int count_components(int n, std::vector<std::pair<int, int>> const& edges) {
      std::vector<int> parent(n);
      for (int i = 0; i < n; ++i) {
        parent[i] = i;
      }
      auto find = [&](int x) {
        while (parent[x] != x) {
          x = parent[x] = parent[parent[x]];
        }
        return x;
      };
      int c = n;
      for (auto const& [a, b] : edges) {
        int x = find(a), y = find(b);
        if (x != y) {
          parent[x] = y;
          --c;
        }
      }
      return c;
    }
  }  // namespace

  MedianReport is_median(std::vector<std::vector<int>> const& adj, int cap) {
    int n = static_cast<int>(adj.size());
    if (n > cap) {
      throw ResourceError("is_median: " + std::to_string(n) + " vertices exceed the cap of " + std::to_string(cap));
    }
    MedianReport rep;
    auto         d = all_distances(adj);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (d[a][b] < 0) {
          rep.bad_triple = {a, b, b};
          return rep;
        }
      }
    }
    int                                nwords = (n + 63) / 64;
    std::vector<std::vector<uint64_t>> interval(n * n, std::vector<uint64_t>(nwords, 0));
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        for (int m = 0; m < n; ++m) {
          if (d[a][m] + d[m][b] == d[a][b]) {
            interval[a * n + b][m / 64] |= uint64_t(1) << (m % 64);
          }
        }
      }
    }
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        for (int c = b + 1; c < n; ++c) {
          ++rep.triples;
          int count = 0;
          for (int k = 0; k < nwords; ++k) {
            count += std::popcount(interval[a * n + b][k] & interval[b * n + c][k] & interval[a * n + c][k]);
          }
          if (count != 1) {
            rep.bad_triple = {a, b, c};
            rep.medians = count;
            return rep;
          }
        }
      }
    }
    rep.ok = true;
    return rep;
  }

  MedianReport is_median(DualCubeComplex const& cc, int cap) { return is_median(cc.adjacency(), cap); }

  HyperplaneReport verify_hyperplanes(DualCubeComplex const& cc, FiniteWallspace const& ws) {
    HyperplaneReport rep;
    int              ne = static_cast<int>(cc.edges.size());
    std::map<std::pair<int, int>, int> edge_at;  // (lower vertex, wall)
    for (int i = 0; i < ne; ++i) {
      edge_at[{cc.edges[i].u, cc.edges[i].wall}] = i;
    }
    std::vector<int> parent(ne);
    for (int i = 0; i < ne; ++i) {
      parent[i] = i;
    }
    auto find = [&](int x) {
      while (parent[x] != x) {
        x = parent[x] = parent[parent[x]];
      }
      return x;
    };
    std::map<std::vector<int>, int> id;
    for (int v = 0; v < static_cast<int>(cc.vertices.size()); ++v) {
      id[cc.vertices[v]] = v;
    }
    // opposite edges of every square are parallel
    for (auto const& c : cc.cubes) {
      if (c.walls.size() != 2) {
        continue;
      }
      int  v = c.corner, w1 = c.walls[0], w2 = c.walls[1];
      auto o1 = cc.vertices[v], o2 = cc.vertices[v];
      o1[w2] = 1;
      o2[w1] = 1;
      int a = edge_at.at({v, w1}), b = edge_at.at({id.at(o1), w1});
      int x = edge_at.at({v, w2}), y = edge_at.at({id.at(o2), w2});
      parent[find(a)] = find(b);
      parent[find(x)] = find(y);
    }
    std::map<int, std::set<int>> class_walls;
    std::map<int, std::vector<int>> class_edges;
    for (int i = 0; i < ne; ++i) {
      class_walls[find(i)].insert(cc.edges[i].wall);
      class_edges[find(i)].push_back(i);
    }
    std::set<int> realized;
    for (int w = 0; w < ws.num_walls(); ++w) {
      bool neg = false, pos = false;
      for (auto const& o : cc.vertices) {
        (o.at(w) < 0 ? neg : pos) = true;
      }
      if (neg && pos) {
        realized.insert(w);
      }
    }
    rep.hyperplanes = static_cast<int>(class_walls.size());
    rep.realized_walls = static_cast<int>(realized.size());
    rep.classes_match = rep.hyperplanes == rep.realized_walls;
    for (auto const& [c, wl] : class_walls) {
      rep.classes_match = rep.classes_match && wl.size() == 1 && realized.count(*wl.begin());
    }
    if (!rep.classes_match) {
      rep.detail = "parallelism classes do not match walls";
    }
    rep.all_separate = true;
    for (auto const& [c, list] : class_edges) {
      std::set<int>                    cut(list.begin(), list.end());
      std::vector<std::pair<int, int>> rest;
      for (int i = 0; i < ne; ++i) {
        if (!cut.count(i)) {
          rest.push_back({cc.edges[i].u, cc.edges[i].v});
        }
      }
      if (count_components(static_cast<int>(cc.vertices.size()), rest) != 2) {
        rep.all_separate = false;
        rep.detail = "hyperplane of wall " + std::to_string(cc.edges[list.front()].wall) + " does not separate";
        break;
      }
    }
    rep.ok = rep.classes_match && rep.all_separate
             && count_components(static_cast<int>(cc.vertices.size()), [&] {
                  std::vector<std::pair<int, int>> all;
                  for (auto const& e : cc.edges) {
                    all.push_back({e.u, e.v});
                  }
                  return all;
                }()) == 1;
    return rep;
  }

  LinkReport link_flag_check(DualCubeComplex const& cc) {
    LinkReport rep;
    std::map<std::vector<int>, int> id;
    for (int v = 0; v < static_cast<int>(cc.vertices.size()); ++v) {
      id[cc.vertices[v]] = v;
    }
    // cubes through each vertex, by their wall sets
    std::vector<std::set<std::vector<int>>> at(cc.vertices.size());
    for (auto const& c : cc.cubes) {
      int dim = static_cast<int>(c.walls.size());
      for (uint32_t sub = 0; sub < (uint32_t(1) << dim); ++sub) {
        auto o = cc.vertices[c.corner];
        for (int j = 0; j < dim; ++j) {
          if (sub >> j & 1) {
            o[c.walls[j]] = 1;
          }
        }
        at[id.at(o)].insert(c.walls);
      }
    }
    std::vector<std::vector<int>> link(cc.vertices.size());
    for (auto const& e : cc.edges) {
      link[e.u].push_back(e.wall);
      link[e.v].push_back(e.wall);
    }
    for (int v = 0; v < static_cast<int>(cc.vertices.size()); ++v) {
      auto& lk = link[v];
      std::sort(lk.begin(), lk.end());
      auto adjacent = [&](int a, int b) { return at[v].count({std::min(a, b), std::max(a, b)}) != 0; };
      int  k = static_cast<int>(lk.size());
      // every pairwise adjacent family of 3 or 4 link vertices spans a simplex
      for (uint32_t mask = 0; mask < (uint32_t(1) << std::min(k, 20)); ++mask) {
        int dim = std::popcount(mask);
        if (dim < 3 || dim > cc.max_dim) {
          continue;
        }
        std::vector<int> s;
        for (int j = 0; j < k; ++j) {
          if (mask >> j & 1) {
            s.push_back(lk[j]);
          }
        }
        bool clique = true;
        for (int i = 0; i < dim && clique; ++i) {
          for (int j = i + 1; j < dim && clique; ++j) {
            clique = adjacent(s[i], s[j]);
          }
        }
        if (!clique) {
          continue;
        }
        ++rep.cliques;
        if (!at[v].count(s)) {
          std::ostringstream os;
          os << "vertex " << v << ": walls";
          for (int x : s) {
            os << " " << x;
          }
          os << " cross pairwise but span no cube";
          rep.detail = os.str();
          return rep;
        }
      }
    }
    rep.ok = true;
    return rep;
  }

  std::string dual_to_json(DualCubeComplex const& cc, FiniteWallspace const& ws) {
    using nlohmann::json;
    json out;
    out["walls"] = ws.wall_names;
    out["vertices"] = cc.vertices;
    json edges = json::array();
    for (auto const& e : cc.edges) {
      edges.push_back({e.u, e.v, e.wall});
    }
    out["edges"] = edges;
    json cubes = json::array();
    for (auto const& c : cc.cubes) {
      cubes.push_back({{"corner", c.corner}, {"walls", c.walls}});
    }
    out["cubes"] = cubes;
    out["principal"] = cc.principal;
    out["dimension"] = cc.dimension();
    return out.dump(2);
  }

  std::string dual_to_dot(DualCubeComplex const& cc) {
    std::ostringstream os;
    os << "graph dual {\n";
    for (size_t v = 0; v < cc.vertices.size(); ++v) {
      os << "  v" << v << " [label=\"";
      for (int s : cc.vertices[v]) {
        os << (s > 0 ? '+' : '-');
      }
      os << "\"];\n";
    }
    for (auto const& e : cc.edges) {
      os << "  v" << e.u << " -- v" << e.v << " [label=\"" << e.wall << "\"];\n";
    }
    os << "}\n";
    return os.str();
  }

}  // namespace flowcube
