#include "flowcube/io.hpp"

#include <fstream>
#include <sstream>

#include "flowcube/errors.hpp"
#include "json.hpp"

using nlohmann::json;

namespace flowcube {

  namespace {

    json const& member(json const& j, char const* key, std::string const& path) {
      if (!j.is_object() || !j.contains(key)) {
        throw InputError("at " + path + ": missing key \"" + key + "\"");
      }
      return j.at(key);
    }

    std::string as_string(json const& j, std::string const& path) {
      if (!j.is_string()) {
        throw InputError("at " + path + ": expected a string");
      }
      return j.get<std::string>();
    }

    int as_int(json const& j, std::string const& path) {
      if (!j.is_number_integer()) {
        throw InputError("at " + path + ": expected an integer");
      }
      return j.get<int>();
    }

    NormalForm as_word(FreeProduct const& G, json const& j, std::string const& path) {
      try {
        return G.parse(as_string(j, path));
      } catch (InputError const& e) {
        throw InputError("at " + path + ": " + e.what());
      }
    }

    std::string line_col(std::string const& text, size_t byte) {
      size_t line = 1, col = 1;
      for (size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
          ++line;
          col = 1;
        } else {
          ++col;
        }
      }
      return "line " + std::to_string(line) + ", column " + std::to_string(col);
    }

    std::string join(std::vector<std::string> const& v) {
      std::string out;
      for (auto const& s : v) {
        out += (out.empty() ? "" : "; ") + s;
      }
      return out;
    }

  }  // namespace

  Problem parse_problem(std::string const& text, std::string const& name) {
    json doc;
    try {
      doc = json::parse(text);
    } catch (json::parse_error const& e) {
      throw InputError(name + ": JSON parse error at " + line_col(text, e.byte) + ": " + e.what());
    }
    Problem p;
    p.name = name;
    try {
      std::vector<Factor> factors;
      if (doc.contains("factors")) {
        auto const& fl = doc.at("factors");
        if (!fl.is_array()) {
          throw InputError("at /factors: expected a list");
        }
        for (size_t i = 0; i < fl.size(); ++i) {
          std::string path = "/factors/" + std::to_string(i);
          Factor      f;
          f.id = as_string(member(fl[i], "id", path), path + "/id");
          f.rank = fl[i].contains("rank") ? as_int(fl[i].at("rank"), path + "/rank") : 1;
          if (fl[i].contains("generators")) {
            for (auto const& g : fl[i].at("generators")) {
              f.generators.push_back(as_string(g, path + "/generators"));
            }
          }
          factors.push_back(std::move(f));
        }
      }
      int                      free_rank = as_int(member(doc, "free_rank", ""), "/free_rank");
      std::vector<std::string> free_names;
      if (doc.contains("free_generators")) {
        for (auto const& g : doc.at("free_generators")) {
          free_names.push_back(as_string(g, "/free_generators"));
        }
      }
      FactorSystem fs(std::move(factors), free_rank, std::move(free_names));
      p.group = std::make_shared<FreeProduct const>(fs);
      auto const& G = *p.group;
      if (!fs.standing_hypotheses()) {
        p.warnings.push_back("standing hypotheses not met: need free_rank >= 2 or factors + free_rank >= 3");
      }

      auto const&             aut = member(doc, "automorphism", "");
      std::vector<NormalForm> images(G.num_generators()), inverse(G.num_generators());
      for (auto [key, table] : {std::pair{"images", &images}, std::pair{"inverse_images", &inverse}}) {
        std::string path = std::string("/automorphism/") + key;
        auto const& m = member(aut, key, "/automorphism");
        for (int g = 0; g < G.num_generators(); ++g) {
          auto const& gname = fs.generator_name(g);
          (*table)[g] = as_word(G, member(m, gname.c_str(), path), path + "/" + gname);
        }
        for (auto const& [k, v] : m.items()) {
          if (fs.generator_index(k) < 0) {
            throw InputError("at " + path + ": unknown generator '" + k + "'");
          }
        }
      }
      Automorphism phi(p.group, std::move(images), std::move(inverse));

      auto const&              gj = member(doc, "graph", "");
      std::vector<GraphVertex> vertices;
      auto const&              vl = member(gj, "vertices", "/graph");
      for (size_t i = 0; i < vl.size(); ++i) {
        std::string path = "/graph/vertices/" + std::to_string(i);
        GraphVertex v;
        v.id = as_string(member(vl[i], "id", path), path + "/id");
        std::string mark = vl[i].contains("mark") ? as_string(vl[i].at("mark"), path + "/mark") : "free";
        if (mark != "free") {
          v.factor = fs.factor_index(mark);
          if (v.factor < 0) {
            throw InputError("at " + path + "/mark: unknown factor '" + mark + "'");
          }
        }
        vertices.push_back(std::move(v));
      }
      auto vindex = [&](std::string const& id, std::string const& path) {
        for (size_t v = 0; v < vertices.size(); ++v) {
          if (vertices[v].id == id) {
            return static_cast<int>(v);
          }
        }
        throw InputError("at " + path + ": unknown vertex '" + id + "'");
      };
      std::vector<GraphEdge> edges;
      bool                   labelled = false;
      auto const&            el = member(gj, "edges", "/graph");
      for (size_t i = 0; i < el.size(); ++i) {
        std::string path = "/graph/edges/" + std::to_string(i);
        GraphEdge   e;
        e.id = as_string(member(el[i], "id", path), path + "/id");
        e.from = vindex(as_string(member(el[i], "from", path), path + "/from"), path + "/from");
        e.to = vindex(as_string(member(el[i], "to", path), path + "/to"), path + "/to");
        if (el[i].contains("label")) {
          labelled = true;
          e.label = as_word(G, el[i].at("label"), path + "/label");
        }
        edges.push_back(std::move(e));
      }
      if (vertices.empty()) {
        throw InputError("at /graph/vertices: graph has no vertices");
      }
      auto graph = labelled ? MarkedGraph(p.group, std::move(vertices), std::move(edges))
                            : MarkedGraph::with_standard_marking(p.group, std::move(vertices), std::move(edges));
      auto vr = validate_marked_graph(graph);
      if (!vr.ok) {
        throw InputError("at /graph: " + join(vr.problems));
      }
      p.graph = std::make_shared<MarkedGraph const>(std::move(graph));
      p.tree = std::make_shared<BassSerreTree const>(p.graph);

      auto const& mj = member(doc, "map", "");
      p.map.tree = p.tree;
      p.map.phi = phi;
      p.map.edge_images.resize(p.graph->num_edges());
      p.map.vertex_images.resize(p.graph->num_vertices());
      auto const& me = member(mj, "edges", "/map");
      for (int e = 0; e < p.graph->num_edges(); ++e) {
        auto const& id = p.graph->edges()[e].id;
        std::string path = "/map/edges/" + id;
        auto const& steps = member(me, id.c_str(), "/map/edges");
        for (size_t k = 0; k < steps.size(); ++k) {
          std::string sp = path + "/" + std::to_string(k);
          Step        s;
          s.edge.g = steps[k].contains("g") ? as_word(G, steps[k].at("g"), sp + "/g") : NormalForm();
          auto eid = as_string(member(steps[k], "edge", sp), sp + "/edge");
          s.edge.edge = p.graph->edge_index(eid);
          if (s.edge.edge < 0) {
            throw InputError("at " + sp + "/edge: unknown edge '" + eid + "'");
          }
          s.dir = steps[k].contains("dir") ? as_int(steps[k].at("dir"), sp + "/dir") : 1;
          if (s.dir != 1 && s.dir != -1) {
            throw InputError("at " + sp + "/dir: must be 1 or -1");
          }
          p.map.edge_images[e].push_back(std::move(s));
        }
      }
      auto const& mv = member(mj, "vertices", "/map");
      for (int v = 0; v < p.graph->num_vertices(); ++v) {
        auto const& id = p.graph->vertices()[v].id;
        std::string path = "/map/vertices/" + id;
        auto const& img = member(mv, id.c_str(), "/map/vertices");
        p.map.vertex_images[v].g = img.contains("g") ? as_word(G, img.at("g"), path + "/g") : NormalForm();
        auto vid = as_string(member(img, "vertex", path), path + "/vertex");
        p.map.vertex_images[v].vertex = p.graph->vertex_index(vid);
        if (p.map.vertex_images[v].vertex < 0) {
          throw InputError("at " + path + "/vertex: unknown vertex '" + vid + "'");
        }
      }
      auto mr = validate_graph_map(p.map);
      if (!mr.ok) {
        throw InputError("at /map: " + join(mr.problems));
      }
    } catch (json::exception const& e) {
      throw InputError(name + ": " + e.what());
    } catch (InputError const& e) {
      throw InputError(name + ": " + e.what());
    }
    return p;
  }

  Problem load_problem(std::string const& path) {
    std::ifstream in(path);
    if (!in) {
      throw InputError("cannot open '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str(), path);
  }

  Problem load_fixture(std::string const& file) {
    return load_problem(std::string(FLOWCUBE_FIXTURE_DIR) + "/" + file);
  }

  std::string dump_problem(Problem const& p) {
    auto const& G = *p.group;
    auto const& fs = G.system();
    json        doc;
    doc["factors"] = json::array();
    for (auto const& f : fs.factors()) {
      doc["factors"].push_back({{"id", f.id}, {"rank", f.rank}, {"generators", f.generators}});
    }
    doc["free_rank"] = fs.free_rank();
    doc["free_generators"] = fs.free_generators();
    json images = json::object(), inverse = json::object();
    for (int g = 0; g < G.num_generators(); ++g) {
      images[fs.generator_name(g)] = G.format(p.map.phi.images()[g]);
      inverse[fs.generator_name(g)] = G.format(p.map.phi.inverse_images()[g]);
    }
    doc["automorphism"] = {{"images", images}, {"inverse_images", inverse}};
    auto const& gr = *p.graph;
    json        vs = json::array(), es = json::array();
    for (auto const& v : gr.vertices()) {
      vs.push_back({{"id", v.id}, {"mark", v.factor < 0 ? std::string("free") : fs.factors()[v.factor].id}});
    }
    for (auto const& e : gr.edges()) {
      es.push_back({{"id", e.id},
                    {"from", gr.vertices()[e.from].id},
                    {"to", gr.vertices()[e.to].id},
                    {"label", G.format(e.label)}});
    }
    doc["graph"] = {{"vertices", vs}, {"edges", es}};
    json me = json::object(), mv = json::object();
    for (int e = 0; e < gr.num_edges(); ++e) {
      json steps = json::array();
      for (auto const& s : p.map.edge_images[e]) {
        steps.push_back({{"g", G.format(s.edge.g)}, {"edge", gr.edges()[s.edge.edge].id}, {"dir", s.dir}});
      }
      me[gr.edges()[e].id] = steps;
    }
    for (int v = 0; v < gr.num_vertices(); ++v) {
      auto const& vi = p.map.vertex_images[v];
      mv[gr.vertices()[v].id] = {{"g", G.format(vi.g)}, {"vertex", gr.vertices()[vi.vertex].id}};
    }
    doc["map"] = {{"edges", me}, {"vertices", mv}};
    return doc.dump(2);
  }

  std::string format_vertex(BassSerreTree const& t, TreeVertex const& v) {
    return t.group().format(v.label) + " . " + t.graph().vertices()[v.base].id;
  }

  std::string format_edge(BassSerreTree const& t, TreeEdge const& e) {
    return "(" + t.group().format(e.g) + ", " + t.graph().edges()[e.edge].id + ")";
  }

  std::string format_point(BassSerreTree const& t, TreePoint const& p) {
    return p.on_vertex ? format_vertex(t, p.vertex) : format_edge(t, p.edge) + "@" + to_string(p.t);
  }

  std::string ball_to_json(BassSerreTree const& t, TreeBall const& b) {
    json doc;
    doc["center"] = format_vertex(t, b.center);
    doc["radius"] = b.radius;
    doc["angle_cap"] = b.angle_cap;
    json vs = json::array(), es = json::array();
    for (size_t i = 0; i < b.vertices.size(); ++i) {
      vs.push_back({{"id", format_vertex(t, b.vertices[i])},
                    {"singular", t.is_singular(b.vertices[i])},
                    {"depth", b.depth[i]}});
    }
    for (auto const& e : b.edges) {
      es.push_back({{"edge", format_edge(t, e)},
                    {"from", format_vertex(t, t.source(e))},
                    {"to", format_vertex(t, t.target(e))},
                    {"orbit", t.graph().edges()[e.edge].id}});
    }
    doc["vertices"] = vs;
    doc["edges"] = es;
    return doc.dump(2);
  }

  std::string ball_to_dot(BassSerreTree const& t, TreeBall const& b) {
    std::ostringstream out;
    out << "graph ball {\n";
    for (size_t i = 0; i < b.vertices.size(); ++i) {
      out << "  v" << i << " [label=\"" << format_vertex(t, b.vertices[i]) << "\", shape="
          << (t.is_singular(b.vertices[i]) ? "box" : "circle") << "];\n";
    }
    for (auto const& e : b.edges) {
      out << "  v" << b.vertex_index.at(t.source(e)) << " -- v" << b.vertex_index.at(t.target(e))
          << " [label=\"" << t.graph().edges()[e.edge].id << "\"];\n";
    }
    out << "}\n";
    return out.str();
  }

}  // namespace flowcube
