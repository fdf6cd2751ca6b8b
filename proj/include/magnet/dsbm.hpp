#pragma once

// Directed stochastic block model sampling in two stages: each unordered
// vertex pair {u, v} receives an undirected edge with probability
// alpha(c_u, c_v); an accepted edge is oriented u -> v with probability
// beta(c_u, c_v) (u < v), otherwise v -> u. Exactly one direction is kept,
// there are no self-loops, and every pair draws from its own seeded
// sub-stream so the sample is independent of iteration order.

#include <cstdint>
#include <vector>

#include "magnet/autodiff.hpp"
#include "magnet/graph.hpp"

namespace magnet {

struct DsbmParams {
    int num_vertices = 0;
    int num_clusters = 0;
    std::vector<int> cluster_sizes;           // sums to num_vertices
    std::vector<std::vector<double>> alpha;   // symmetric, entries in [0, 1]
    std::vector<std::vector<double>> beta;    // beta[i][j] + beta[j][i] = 1
                                              // wherever alpha[i][j] > 0
    std::uint64_t seed = 0;
};

void validate_dsbm(const DsbmParams& p);

struct DsbmSample {
    DirectedGraph graph;
    std::vector<int> labels;   // cluster index per vertex, block-contiguous
    RealMatrix features;       // N x 1 standard normal, separate seed stream
};

DsbmSample sample_dsbm(const DsbmParams& p);

// Ordered meta-graph: uniform connection probability (alpha_diag within
// clusters, alpha_star across), orientation beta_star from higher-indexed
// to lower-indexed clusters and 1 - beta_star back; 1/2 within clusters.
DsbmParams ordered_meta(int num_vertices, int num_clusters, double alpha_star,
                        double alpha_diag, double beta_star,
                        std::uint64_t seed);

// Cyclic meta-graph on clusters 0..c-1: connections only within clusters and
// between cyclically adjacent clusters (probability 0.1); each cluster sends
// edges to its predecessor with probability beta_star and receives with
// 1 - beta_star. The noisy variant connects every cluster pair with
// probability 0.1, the non-cycle pairs oriented fairly.
DsbmParams cyclic_meta(int num_vertices, int num_clusters, double beta_star,
                       bool noisy, std::uint64_t seed);

// Even block sizes: num_vertices / c, the remainder spread over the first
// blocks.
std::vector<int> even_cluster_sizes(int num_vertices, int num_clusters);

}  // namespace magnet
