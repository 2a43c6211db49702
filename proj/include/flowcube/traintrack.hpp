#pragma once

// Equivariant graph maps f : T -> T realising an automorphism, their
// derivative on germs, legality, transition matrices and stretch factors.

#include <memory>
#include <string>
#include <vector>

#include "flowcube/automorphism.hpp"
#include "flowcube/tree.hpp"

namespace flowcube {

  struct VertexImage {
    NormalForm g;  // f(v_b) = g . v_vertex
    int        vertex = 0;
  };

  struct GraphMap {
    std::shared_ptr<BassSerreTree const> tree;
    Automorphism                         phi;
    std::vector<std::vector<Step>>       edge_images;  // image of the edge (1, e)
    std::vector<VertexImage>             vertex_images;

    MarkedGraph const& graph() const { return tree->graph(); }
    FreeProduct const& group() const { return tree->group(); }
    int                num_edges() const { return graph().num_edges(); }
  };

  // f on tree vertices, edges and points (edges mapped linearly onto their
  // image paths, every edge of length 1).
  TreeVertex map_vertex(GraphMap const& m, TreeVertex const& x);
  Path       map_edge(GraphMap const& m, TreeEdge const& e);
  Path       map_step(GraphMap const& m, Step const& s);
  TreePoint  map_point(GraphMap const& m, TreePoint const& p);
  TreePoint  map_point(GraphMap const& m, TreePoint const& p, int n);
  // Concatenated (untightened) image of a path.
  Path       map_path(GraphMap const& m, Path const& p);

  // f^n as a graph map: images composed n times and tightened.
  GraphMap power(GraphMap const& m, int n);

  struct GraphMapReport : ValidationReport {
    std::vector<int> mismatched_generators;  // where the induced map disagrees with phi
  };

  GraphMapReport validate_graph_map(GraphMap const& m);

  // Df on directed germs.
  Germ derivative(GraphMap const& m, Germ const& d);

  // The illegal turn (germ(1, rep_a), germ(delta, rep_b)) at v_vertex, up to
  // the stabiliser. Degenerate turns appear as (r, r, 1).
  struct IllegalTurn {
    int        vertex;
    int        rep_a;
    int        rep_b;
    NormalForm delta;
    bool       operator==(IllegalTurn const&) const = default;
  };

  struct TurnTable {
    std::vector<std::vector<IllegalTurn>> at;  // indexed by quotient vertex

    bool is_illegal(int vertex, int rep_a, int rep_b, NormalForm const& delta) const;
  };

  TurnTable compute_illegal_turns(GraphMap const& m);
  bool      is_legal_turn(GraphMap const& m, Germ const& a, Germ const& b);

  struct TrainTrackReport {
    bool        ok = false;
    std::string failure;   // empty on success
    int         power = 0; // power of f at which the failure shows up
    Germ        turn_a, turn_b;
    bool        has_turn = false;
  };

  TrainTrackReport is_train_track(GraphMap const& m, int max_power);

  using IntMatrix = std::vector<std::vector<long long>>;
  IntMatrix transition_matrix(GraphMap const& m);
  IntMatrix multiply(IntMatrix const& a, IntMatrix const& b);
  IntMatrix matrix_power(IntMatrix const& a, int n);

  struct StretchResult {
    double value = 0;
    double lower = 0;
    double upper = 0;
    int    iterations = 0;
  };

  // Perron-Frobenius eigenvalue by power iteration on M + I with
  // Collatz-Wielandt bounds; stops when the bracket is below tol relative.
  StretchResult stretch_factor(IntMatrix const& M, double tol, int max_iterations = 200000);

  struct IrreducibilityReport {
    bool              irreducible = false;
    bool              primitive = false;
    int               primitive_power = 0;
    std::vector<int>  witness;  // edge orbits of a non-exceptional invariant subgraph
    int               witness_power = 0;
    std::vector<std::vector<int>> exceptional;  // invariant forests allowed by definition
  };

  IrreducibilityReport check_irreducible(GraphMap const& m, int max_power);

  // f^n restricted to an edge orbit as affine pieces: the parameter interval
  // [lo, hi] of (1, e) is carried onto `edge`, forwards when dir is +1.
  struct Piece {
    Rational lo, hi;
    TreeEdge edge;
    int      dir = 1;
  };

  std::vector<Piece> iterate_pieces(GraphMap const& m, int e, int n);
  // Offset on piece.edge of parameter t in [lo, hi].
  Rational           piece_offset(Piece const& p, Rational const& t);

  std::string describe(BassSerreTree const& t, Germ const& d);

}  // namespace flowcube
