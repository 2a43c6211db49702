#pragma once

// Finite wallspaces and their dual cube complexes.

#include <string>
#include <vector>

#include "flowcube/walls.hpp"

namespace flowcube {

  struct FiniteWallspace {
    int                              points = 0;
    std::vector<std::pair<int, int>> edges;  // carrier edges, crossing no wall
    std::vector<std::vector<int>>    sides;  // sides[w][p] in {-1, +1}
    std::vector<std::string>         point_names;
    std::vector<std::string>         wall_names;
    int                              base = 0;

    int num_walls() const { return static_cast<int>(sides.size()); }
  };

  // Throws InputError on a wall with an empty side, a bad side value or an
  // edge crossing a wall.
  void validate_wallspace(FiniteWallspace const& ws);

  // n pairwise crossing walls on the vertices of {0,1}^n.
  FiniteWallspace crossing_wallspace(int n);
  // Edge walls of a finite tree given by its edge list.
  FiniteWallspace tree_wallspace(int vertices, std::vector<std::pair<int, int>> const& edges);
  // Walls of one complex, each a set of components with verdict "wall". The
  // carrier is the complementary regions lying on a definite side of every wall.
  FiniteWallspace window_wallspace(WallComplex const& w, std::vector<std::vector<int>> const& walls);

  struct DualEdge {
    int u = 0, v = 0;
    int wall = 0;  // u has side -1, v has side +1
  };

  struct Cube {
    int              corner = 0;  // the vertex with side -1 on every wall of the cube
    std::vector<int> walls;
  };

  struct DualCubeComplex {
    int                           walls = 0;
    std::vector<std::vector<int>> vertices;  // orientations
    std::vector<DualEdge>         edges;
    std::vector<Cube>             cubes;     // dimension >= 2
    std::vector<int>              principal; // vertex of each carrier point
    int                           max_dim = 4;

    int                           dimension() const;
    std::vector<std::vector<int>> adjacency() const;
  };

  struct DualOptions {
    int wall_cap = 16;
    int dim_cap = 4;
  };

  DualCubeComplex build_dual(FiniteWallspace const& ws, DualOptions const& opt = {});

  struct MedianReport {
    bool             ok = false;
    long             triples = 0;
    std::vector<int> bad_triple;
    int              medians = 0;  // medians found for the bad triple
  };

  MedianReport is_median(std::vector<std::vector<int>> const& adjacency, int cap = 512);
  MedianReport is_median(DualCubeComplex const& cc, int cap = 512);

  struct HyperplaneReport {
    bool        ok = false;
    int         hyperplanes = 0;
    int         realized_walls = 0;
    bool        classes_match = false;  // each parallelism class is the edge set of one wall
    bool        all_separate = false;   // removing a class leaves exactly two components
    std::string detail;
  };

  HyperplaneReport verify_hyperplanes(DualCubeComplex const& cc, FiniteWallspace const& ws);

  struct LinkReport {
    bool        ok = false;
    int         cliques = 0;  // pairwise crossing families of 3 or 4 walls at a corner
    std::string detail;
  };

  LinkReport link_flag_check(DualCubeComplex const& cc);

  std::string dual_to_json(DualCubeComplex const& cc, FiniteWallspace const& ws);
  std::string dual_to_dot(DualCubeComplex const& cc);

}  // namespace flowcube
