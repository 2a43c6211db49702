#pragma once

// Finite pieces of the flow space: levels T_i, forward and backward flows,
// principal and periodic flow lines, and windows of X and X_L.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flowcube/traintrack.hpp"

namespace flowcube {

  struct FlowPoint {
    int       level = 0;
    TreePoint point;
    bool      operator==(FlowPoint const& o) const { return level == o.level && point == o.point; }
    bool      operator<(FlowPoint const& o) const {
      return level != o.level ? level < o.level : point < o.point;
    }
  };

  // The element g t^k of the mapping torus group.
  struct FlowElement {
    NormalForm g;
    int        k = 0;
  };

  // g acts on T_i through phi^i(g); t shifts levels up by one.
  FlowPoint act(GraphMap const& m, NormalForm const& g, FlowPoint const& x);
  FlowPoint act(GraphMap const& m, FlowElement const& gamma, FlowPoint const& x);

  struct FlowSegmentChain {
    FlowPoint              start;
    std::vector<FlowPoint> steps;  // steps[k] = f^(k+1)(start)
    FlowPoint const&       end() const { return steps.empty() ? start : steps.back(); }
  };

  FlowSegmentChain flow_forward(GraphMap const& m, FlowPoint const& x, int k);

  // Preimages of a vertex with non-trivial stabiliser form finitely many
  // orbits of Stab(c), c being the unique singular preimage.
  struct PreimageFamily {
    TreePoint  representative;
    TreeVertex stabilised_by;
  };

  struct PreimageResult {
    std::vector<FlowPoint>      points;    // the finite part, sorted
    std::vector<PreimageFamily> families;  // non-empty only for singular targets
    std::optional<TreeVertex>   singular;  // the unique singular preimage
    bool                        complete = false;
    std::string                 certificate;
  };

  // Enumerates f^-1(x) from the edge images: a point on (g, e) at offset t is
  // hit by the j-th step of f(1, e') exactly once per matching step.
  PreimageResult preimages(GraphMap const& m, FlowPoint const& x);
  // The unique singular vertex mapping to a singular vertex v.
  TreeVertex     singular_preimage(GraphMap const& m, TreeVertex const& v);

  struct BackwardFlow {
    struct Node {
      FlowPoint point;
      int       parent = -1;
      int       depth = 0;
    };
    std::vector<Node> nodes;  // nodes[0] is the root
    std::vector<int>  leaves;
    bool              branches_disjoint = false;
  };

  // tau_L(x). Throws ResourceError when some backward step is infinite.
  BackwardFlow backward_flow_tree(GraphMap const& m, FlowPoint const& x, int L);

  struct PrincipalLine {
    int                        seed_level = 0;
    TreeVertex                 seed;
    std::map<int, TreeVertex>  chain;
    std::map<int, EllipticInfo> stabilizers;
  };

  PrincipalLine principal_flow_line(GraphMap const& m, TreeVertex const& v, int level, int lo, int hi);

  struct PeriodicOrbit {
    Rational   offset;  // parameter on (1, edge); 0 or 1 for a vertex
    int        edge = 0;
    TreePoint  point;
    int        period = 1;
    NormalForm g;           // f^period(point) = g . point
    NormalForm suspension;  // h with h t^period carrying x_0 to x_period
  };

  struct PeriodicSearch {
    std::vector<PeriodicOrbit> orbits;  // sorted by offset, then period
    Rational                   eps;
    std::vector<int>           density;  // per eps-subinterval: an orbit index or -1
    bool                       dense() const;
  };

  PeriodicSearch find_periodic_points(GraphMap const& m, int edge, Rational const& eps, int n_max);

  struct PeriodicLine {
    std::map<int, TreePoint> points;
    FlowElement              translation;
    bool                     consistent = false;  // f(x_j) = x_(j+1) throughout
    bool                     translation_ok = false;
  };

  PeriodicLine periodic_flow_line(GraphMap const& m, PeriodicOrbit const& orbit, int lo, int hi);

  struct DivergenceProfile {
    std::vector<Rational> distances;
    bool                  legal = false;
    bool                  monotone = false;
  };

  DivergenceProfile divergence_profile(GraphMap const& m, FlowPoint const& x, FlowPoint const& y, int N);
  // Whether the tree segment [p, q] makes only legal turns.
  bool              segment_is_legal(GraphMap const& m, TreePoint const& p, TreePoint const& q);

  struct Rectangle {
    int      level = 0;  // window level of the vertical edge
    TreeEdge edge;
    Path     image;      // f^scale(edge) in the next level
  };

  struct HorizontalEdge {
    int        level = 0;
    TreeVertex from;
    TreeVertex to;  // in level + 1
  };

  // Window level j holds the tree T_(scale j).
  struct FlowWindow {
    int                         lo = 0, hi = 0;
    int                         scale = 1;
    std::vector<TreeBall>       levels;
    std::vector<Rectangle>      rectangles;
    std::vector<HorizontalEdge> horizontal;

    TreeBall const& at(int level) const { return levels.at(level - lo); }
    bool            covers(int level) const { return level >= lo && level <= hi; }
    int             num_vertices() const;
  };

  struct WindowSpec {
    int        lo = 0, hi = 0;
    int        radius = 2;
    int        angle_cap = 2;
    int        scale = 1;
    TreeVertex center;  // in level lo
  };

  FlowWindow build_window(GraphMap const& m, WindowSpec const& spec);

  // f^n applied n times pointwise (which is how the flow composes).
  Path iterate_path(GraphMap const& m, Path const& p, int n);

  // Breadth-first distances in the window 1-skeleton from a vertex.
  std::map<std::pair<int, TreeVertex>, int>
  skeleton_distances(BassSerreTree const& T, FlowWindow const& w, int level, TreeVertex const& v);

  // Every horizontal edge of the X_L window is carried by rho_L to a chain of
  // scale horizontal edges of the X window with the same endpoints.
  bool check_rho(GraphMap const& m, FlowWindow const& wl, FlowWindow const& w1);

}  // namespace flowcube
