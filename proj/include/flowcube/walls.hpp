#pragma once

// Busts, immersed walls in a window of X_L and the checks run on them.
//
// Complement model. Cylinder i sits between T_(Li) and T_(L(i+1)); its
// fractional tree T'_(Li) is at height 1/2. Below T' the slab over an edge
// with a primary bust d splits into the parts L (over [v0, d-]), R (over
// [d+, v1]), B and U (the bottom and top triangles cut out by the two
// slopes); without a bust it is a single part M. S(v) is the slab over a
// small star of v. Above T' the cylinder splits into tubes Tu over open
// secondary busts, gaps Qe between them, and Qv over the star of a vertex.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flowcube/flowspace.hpp"

namespace flowcube {

  struct Interval {
    Rational lo, hi;
    bool     operator==(Interval const&) const = default;
  };

  // A component of f^-L of a primary bust, on the base edge (1, edge).
  struct SecondaryBust {
    int      edge = 0;
    Interval span;
    TreeEdge target;  // f^L maps span onto the primary bust of target
    int      dir = 1; // +1 when span.lo goes to the lower end
  };

  struct BustSystem {
    int                          L = 1;
    std::map<int, Interval>      primary;    // edge orbit -> interval on (1, e)
    std::vector<SecondaryBust>   secondary;  // sorted by edge, then lo
    std::map<int, PeriodicOrbit> targets;    // provenance

    std::vector<SecondaryBust> on_edge(int e) const;
  };

  BustSystem make_bust_system(GraphMap const& m, int L, std::map<int, Interval> primary,
                              std::map<int, PeriodicOrbit> targets = {});

  struct BustViolation {
    int         condition = 0;  // 1, 3, 5 or 6
    std::string detail;
  };

  struct BustReport {
    bool                       ok = false;
    bool                       vacuous = false;
    bool                       horizon_limited = true;  // condition (3) checked up to the horizon
    int                        horizon = 0;
    std::vector<BustViolation> violations;
  };

  BustReport verify_bust_conditions(GraphMap const& m, BustSystem const& b, int horizon);

  enum class BustPlacement { endpoint, centered };

  struct BustSearch {
    bool        found = false;
    BustSystem  system;
    BustReport  report;
    int         shrink_steps = 0;
    std::string blocking;  // why the search failed
  };

  BustSearch search_busts(GraphMap const& m, std::map<int, PeriodicOrbit> const& targets, Rational const& eps,
                          int L, int horizon, int budget = 12, BustPlacement placement = BustPlacement::endpoint);

  // One interior periodic point per edge orbit whose rays avoid vertices, on
  // pairwise distinct periodic orbits, with f^L images missing the orbits of
  // all chosen targets.
  std::map<int, PeriodicOrbit> choose_targets(GraphMap const& m, int L, int n_max);

  // Interior periodic points of period <= n_max whose rays avoid vertices,
  // per edge orbit, lowest period first.
  std::vector<std::vector<PeriodicOrbit>> target_candidates(GraphMap const& m, int n_max);
  // Distinct periodic orbits, and no f^L image in the orbit of a target.
  bool admissible_targets(GraphMap const& m, int L, std::map<int, PeriodicOrbit> const& targets);

  // Points in the same G-orbit.
  bool same_orbit(TreePoint const& p, TreePoint const& q);

  enum class NodeKind { primary_end, copy_end, secondary_end, center };
  enum class PieceKind { slope, level, arc, star };
  enum class RegionKind { S, L, R, M, B, U, Qv, Qe, Tu };

  struct NodeKey {
    NodeKind   kind = NodeKind::center;
    int        level = 0;
    TreeEdge   edge;
    TreeVertex vertex;
    int        index = -1;
    int        sign = 0;
    auto       operator<=>(NodeKey const&) const = default;
  };

  struct RegionKey {
    RegionKind kind = RegionKind::S;
    int        level = 0;
    TreeEdge   edge;
    TreeVertex vertex;
    int        index = -1;
    auto       operator<=>(RegionKey const&) const = default;
  };

  struct PieceKey {
    PieceKind  kind = PieceKind::star;
    int        level = 0;
    TreeEdge   edge;
    TreeVertex vertex;
    int        index = -1;
    int        sign = 0;
    auto       operator<=>(PieceKey const&) const = default;
  };

  // The wall is two-sided; faces list the region on the negative side first.
  struct Face {
    int neg = -1, pos = -1;
  };

  struct WallPiece {
    PieceKey          key;
    std::vector<int>  nodes;
    std::vector<Face> faces;
  };

  struct Region {
    RegionKey key;
    bool      frontier = false;
  };

  struct WallGraph {
    int              id = 0;
    std::vector<int> pieces;
    std::vector<int> nodes;
    bool             truncated = false;  // touches the window boundary
  };

  struct WallComplex {
    GraphMap                      map;
    BustSystem                    busts;
    FlowWindow                    window;  // scale L
    std::vector<NodeKey>          nodes;
    std::map<NodeKey, int>        node_index;
    std::vector<WallPiece>        pieces;
    std::map<PieceKey, int>       piece_index;
    std::vector<Region>           regions;
    std::map<RegionKey, int>      region_index;
    std::vector<std::pair<int, int>> openings;  // adjacent complementary regions
    std::vector<int>              component_of_node;
    std::vector<WallGraph>        components;

    int component_of_piece(int p) const { return component_of_node[pieces[p].nodes.front()]; }
    int region(RegionKey const& k) const;  // -1 if absent
    // Component containing the slopes of the bust on edge e at level i.
    int component_of_bust(TreeEdge const& e, int level) const;
  };

  // Secondary busts of the tree edge at a level, with targets moved along.
  std::vector<SecondaryBust> secondaries_of(GraphMap const& m, BustSystem const& b, TreeEdge const& e);

  WallComplex assemble_walls(GraphMap const& m, BustSystem const& b, WindowSpec const& spec);

  struct FoldedLevel {
    int                    piece = 0;
    std::vector<FlowPoint> chain;  // levels of X, from T_(Li) to T_(L(i+1))
    bool                   endpoints_ok = false;
    bool                   square_ok = false;
  };

  struct FoldedWall {
    std::vector<FoldedLevel> levels;
    int                      unit_segments = 0;      // distinct horizontal unit segments after folding
    int                      unfolded_segments = 0;  // before
    bool                     ok = false;
  };

  FoldedWall fold_wall(WallComplex const& w, int component);

  struct Approximation {
    int  vertices = 0;
    int  edges = 0;
    int  cycles = 0;
    bool connected = false;
    bool is_tree = false;
  };

  // Image in the X window (scale 1). Each (level, v) in lines_through adds the
  // principal line through v in T_(L level).
  Approximation approximate_wall(WallComplex const& w, std::vector<int> const& components,
                                 std::vector<std::pair<int, TreeVertex>> const& lines_through = {});

  struct ClassInfo {
    int  side = 0;  // -1, +1, 0 (meets no face of the wall) or 2 (both sides)
    bool frontier = false;
    bool deep = false;
    int  regions = 0;
  };

  struct SeparationReport {
    int                    components = 0;  // complementary classes meeting the wall
    bool                   two_sided = false;
    bool                   negative_deep = false;
    bool                   positive_deep = false;
    bool                   same_side_busts = false;
    int                    busts_audited = 0;
    int                    detached = 0;           // classes cut off by the window
    int                    detached_interior = 0;  // of those, classes with a region away from the frontier
    std::vector<ClassInfo> classes;
    std::vector<int>       class_of_region;
    std::string            verdict;  // "wall", "not separating" or "inconclusive"

    int side_of_region(int r) const { return classes[class_of_region[r]].side; }
  };

  SeparationReport check_separation(WallComplex const& w, std::vector<int> const& components, int margin = 1);

  struct Saturation {
    int                       base = 0;
    int                       M = 0;
    std::vector<int>          components;  // W'_u, base first
    std::vector<PrincipalLine> lines;      // principal lines of singular vertices of W'_u
    std::vector<std::string>  trace;
    bool                      connected = false;
    bool                      truncated = false;  // a decision relied on the window proxy
  };

  Saturation saturate_wall(WallComplex const& w, int component, int M);
  Saturation saturate_wall(WallComplex const& w, Saturation const& s);

  struct SaturationAudit {
    bool        contains_base = false;
    bool        closed = false;    // every singular vertex satisfies exactly one branch
    bool        minimal = false;   // every added component is required by some vertex
    bool        lines_match = false;
    bool        ok = false;
    std::string detail;
  };

  SaturationAudit audit_saturation(WallComplex const& w, Saturation const& s);

  // Singular vertices of T' met by the star nuclei of the given components.
  std::vector<std::pair<int, TreeVertex>> singular_vertices(WallComplex const& w, std::vector<int> const& components);

  struct CutReport {
    std::string verdict;  // "separated", "same side", "inside W" or "inconclusive"
    int         side_a = 0, side_b = 0;
    bool        lines_ok = false;  // every materialized line of the window is inside W or on one side
    std::string detail;
  };

  // Probes are principal lines through singular vertices of T_(L level).
  CutReport check_cut(WallComplex const& w, Saturation const& s, PrincipalLine const& a, PrincipalLine const& b);
  // Ends of a single line: separated or not.
  CutReport check_cut(WallComplex const& w, Saturation const& s, PrincipalLine const& a);

  // Principal line through a singular vertex of T_(L level), over the window.
  PrincipalLine window_line(WallComplex const& w, TreeVertex const& v, int level);

  struct OverlapReport {
    int B = 0;
    int pairs = 0;
  };

  OverlapReport ladder_overlap_diameter(WallComplex const& w, std::vector<int> const& components, int R);

  std::vector<FlowElement> wall_stabilizer_search(WallComplex const& w, std::vector<int> const& components,
                                                  int word_bound, int power_bound);

  // Deterministic search over admissible target choices for a bust system
  // whose wall through the bust on (1, e) at the given window level passes
  // check_separation and has a tree approximation, for every edge orbit e.
  struct WallSearch {
    bool                         found = false;
    std::map<int, PeriodicOrbit> targets;
    BustSystem                   busts;
    int                          trials = 0;
    std::string                  blocking;
  };

  WallSearch search_wall_system(GraphMap const& m, int L, Rational const& eps, WindowSpec const& spec, int level,
                                int n_max, int horizon, int max_trials,
                                BustPlacement placement = BustPlacement::endpoint);

  // Centered bust systems searched for a wall through the bust on (1, e) at
  // the given level, of either slope sign, whose M-saturation separates the
  // lines through a and b and leaves the ends of each on one side.
  struct CutSearch {
    bool                         found = false;
    std::map<int, PeriodicOrbit> targets;
    BustSystem                   busts;
    int                          edge = 0;
    int                          sign = 0;
    int                          trials = 0;
    std::string                  blocking;
  };

  CutSearch search_cut_wall(GraphMap const& m, int L, Rational const& eps, WindowSpec const& spec, int level,
                            TreeVertex const& a, TreeVertex const& b, int M, int n_max, int horizon,
                            int max_trials);

  std::string wall_to_json(WallComplex const& w, std::vector<int> const& components);
  std::string wall_to_dot(WallComplex const& w, std::vector<int> const& components);

}  // namespace flowcube
