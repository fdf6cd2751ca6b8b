#pragma once

// Directed graphs as immutable, canonically ordered edge sets, plus the
// adjacency-level quantities the spectral code is built from: the symmetrized
// adjacency, symmetrized degrees, the antisymmetric phase matrix and the
// Hermitian adjacency.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "magnet/sparse.hpp"

namespace magnet {

class Rng;

using Edge = std::pair<int, int>;

// Simple unweighted digraph. Edges are deduplicated, self-loop free and kept
// sorted lexicographically, so two graphs compare equal iff they have the
// same vertex count and edge set.
struct DirectedGraph {
    int num_vertices = 0;
    std::vector<Edge> edges;  // sorted, unique, no self-loops

    int num_edges() const { return static_cast<int>(edges.size()); }
    bool has_edge(int u, int v) const;
    bool operator==(const DirectedGraph&) const = default;
};

// Validates indices, rejects self-loops, sorts and deduplicates.
DirectedGraph make_graph(int num_vertices, std::vector<Edge> edges);

// Edge-list file format: one "src<TAB>dst" pair per line, UTF-8, lines whose
// first non-blank character is '#' are comments. Vertex count is
// 1 + max index unless a "# vertices: N" comment declares it.
DirectedGraph read_edge_list(std::istream& in);
DirectedGraph read_edge_list_file(const std::string& path);
void write_edge_list(const DirectedGraph& g, std::ostream& out);
void write_edge_list_file(const DirectedGraph& g, const std::string& path);

// Fixtures and transforms.
DirectedGraph make_directed_cycle(int n);                       // n -> n+1 mod n
DirectedGraph make_directed_star(int n, bool edges_from_center); // center = 0
DirectedGraph reverse_graph(const DirectedGraph& g);
DirectedGraph random_digraph(int n, double edge_prob, Rng& rng,
                             bool ensure_no_isolated = false);

// Connected components of the undirected support; returns component id per
// vertex and the number of components.
std::pair<std::vector<int>, int> undirected_components(const DirectedGraph& g);

// Symmetrized adjacency A_s(u,v) = (A(u,v) + A(v,u)) / 2. Real symmetric,
// entries in {1/2, 1}.
ComplexSparseMatrix symmetrized_adjacency(const DirectedGraph& g);

// Diagonal of D_s: row sums of A_s.
std::vector<double> symmetrized_degrees(const DirectedGraph& g);

// Phase matrix entries Theta(u,v) = 2*pi*q * (A(u,v) - A(v,u)), kept only on
// the support of A_s (reciprocal pairs carry an explicit zero so the support
// matches A_s). Stored as a real-valued sparse matrix; antisymmetric.
ComplexSparseMatrix phase_matrix(const DirectedGraph& g, double q);

// Hermitian adjacency H(u,v) = A_s(u,v) * exp(i * Theta(u,v)).
// q must lie in [0, 1/4] unless allow_extended_q, in which case any q >= 0
// is accepted; negative q is always rejected.
ComplexSparseMatrix hermitian_adjacency(const DirectedGraph& g, double q,
                                        bool allow_extended_q = false);

void validate_q(double q, bool allow_extended_q);

}  // namespace magnet
