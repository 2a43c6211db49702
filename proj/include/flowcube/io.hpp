#pragma once

// The project JSON format and artifact exports.

#include <memory>
#include <string>
#include <vector>

#include "flowcube/traintrack.hpp"

namespace flowcube {

  struct Problem {
    std::string                          name;
    std::shared_ptr<FreeProduct const>   group;
    std::shared_ptr<MarkedGraph const>   graph;
    std::shared_ptr<BassSerreTree const> tree;
    GraphMap                             map;
    std::vector<std::string>             warnings;
  };

  // Parses and validates. Throws InputError with a line/column or a JSON
  // path in the message.
  Problem parse_problem(std::string const& text, std::string const& name = "<input>");
  Problem load_problem(std::string const& path);
  // Fixture by file name from the bundled fixture directory.
  Problem load_fixture(std::string const& file);

  std::string dump_problem(Problem const& p);

  std::string ball_to_json(BassSerreTree const& t, TreeBall const& b);
  std::string ball_to_dot(BassSerreTree const& t, TreeBall const& b);

  std::string format_vertex(BassSerreTree const& t, TreeVertex const& v);
  std::string format_edge(BassSerreTree const& t, TreeEdge const& e);
  std::string format_point(BassSerreTree const& t, TreePoint const& p);

}  // namespace flowcube
