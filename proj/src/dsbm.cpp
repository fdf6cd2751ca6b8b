#include "magnet/dsbm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace magnet {

void validate_dsbm(const DsbmParams& p) {
    if (p.num_vertices < 2)
        throw std::invalid_argument("DSBM needs >= 2 vertices");
    if (p.num_clusters < 1)
        throw std::invalid_argument("DSBM needs >= 1 cluster");
    if (static_cast<int>(p.cluster_sizes.size()) != p.num_clusters)
        throw std::invalid_argument("cluster size list length mismatch");
    int total = 0;
    for (int s : p.cluster_sizes) {
        if (s <= 0) throw std::invalid_argument("cluster sizes must be positive");
        total += s;
    }
    if (total != p.num_vertices)
        throw std::invalid_argument("cluster sizes must sum to vertex count");
    const int c = p.num_clusters;
    auto square = [&](const std::vector<std::vector<double>>& m) {
        if (static_cast<int>(m.size()) != c) return false;
        for (const auto& row : m)
            if (static_cast<int>(row.size()) != c) return false;
        return true;
    };
    if (!square(p.alpha) || !square(p.beta))
        throw std::invalid_argument("alpha and beta must be c x c matrices");
    for (int i = 0; i < c; ++i) {
        for (int j = 0; j < c; ++j) {
            if (p.alpha[i][j] < 0.0 || p.alpha[i][j] > 1.0)
                throw std::invalid_argument("alpha entries must lie in [0, 1]");
            if (p.beta[i][j] < 0.0 || p.beta[i][j] > 1.0)
                throw std::invalid_argument("beta entries must lie in [0, 1]");
            if (std::abs(p.alpha[i][j] - p.alpha[j][i]) > 1e-12)
                throw std::invalid_argument("alpha must be symmetric");
            if (p.alpha[i][j] > 0.0 &&
                std::abs(p.beta[i][j] + p.beta[j][i] - 1.0) > 1e-12)
                throw std::invalid_argument(
                    "beta[i][j] + beta[j][i] must equal 1 on connected pairs "
                    "(use 1/2 on the diagonal)");
        }
    }
}

DsbmSample sample_dsbm(const DsbmParams& p) {
    validate_dsbm(p);
    const int n = p.num_vertices;

    DsbmSample out;
    out.labels.resize(n);
    int v = 0;
    for (int c = 0; c < p.num_clusters; ++c)
        for (int k = 0; k < p.cluster_sizes[c]; ++k) out.labels[v++] = c;

    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u) {
        for (int w = u + 1; w < n; ++w) {
            const double a = p.alpha[out.labels[u]][out.labels[w]];
            if (a <= 0.0) continue;
            const std::uint64_t key =
                static_cast<std::uint64_t>(u) * static_cast<std::uint64_t>(n) +
                static_cast<std::uint64_t>(w);
            Rng rng = stream_rng(p.seed, Stream::graph_edges, key);
            if (rng.next_unit() >= a) continue;
            const double b = p.beta[out.labels[u]][out.labels[w]];
            if (rng.next_unit() < b)
                edges.push_back({u, w});
            else
                edges.push_back({w, u});
        }
    }
    out.graph = make_graph(n, std::move(edges));

    out.features = RealMatrix(n, 1);
    Rng feat_rng = stream_rng(p.seed, Stream::features);
    for (int i = 0; i < n; ++i) out.features.at(i, 0) = feat_rng.next_normal();
    return out;
}

std::vector<int> even_cluster_sizes(int num_vertices, int num_clusters) {
    if (num_clusters <= 0 || num_vertices < num_clusters)
        throw std::invalid_argument(
            "need at least one vertex per cluster");
    std::vector<int> sizes(num_clusters, num_vertices / num_clusters);
    for (int i = 0; i < num_vertices % num_clusters; ++i) ++sizes[i];
    return sizes;
}

DsbmParams ordered_meta(int num_vertices, int num_clusters, double alpha_star,
                        double alpha_diag, double beta_star,
                        std::uint64_t seed) {
    DsbmParams p;
    p.num_vertices = num_vertices;
    p.num_clusters = num_clusters;
    p.cluster_sizes = even_cluster_sizes(num_vertices, num_clusters);
    p.seed = seed;
    p.alpha.assign(num_clusters, std::vector<double>(num_clusters, alpha_star));
    p.beta.assign(num_clusters, std::vector<double>(num_clusters, 0.5));
    for (int i = 0; i < num_clusters; ++i) {
        p.alpha[i][i] = alpha_diag;
        for (int j = 0; j < i; ++j) {
            p.beta[i][j] = beta_star;
            p.beta[j][i] = 1.0 - beta_star;
        }
    }
    validate_dsbm(p);
    return p;
}

DsbmParams cyclic_meta(int num_vertices, int num_clusters, double beta_star,
                       bool noisy, std::uint64_t seed) {
    if (num_clusters < 3)
        throw std::invalid_argument("cyclic meta-graph needs >= 3 clusters");
    DsbmParams p;
    p.num_vertices = num_vertices;
    p.num_clusters = num_clusters;
    p.cluster_sizes = even_cluster_sizes(num_vertices, num_clusters);
    p.seed = seed;
    const double base = 0.1;
    p.alpha.assign(num_clusters,
                   std::vector<double>(num_clusters, noisy ? base : 0.0));
    p.beta.assign(num_clusters, std::vector<double>(num_clusters, 0.5));
    for (int i = 0; i < num_clusters; ++i) {
        p.alpha[i][i] = base;
        const int next = (i + 1) % num_clusters;
        p.alpha[i][next] = base;
        p.alpha[next][i] = base;
        const int prev = (i - 1 + num_clusters) % num_clusters;
        p.beta[i][prev] = beta_star;
        p.beta[prev][i] = 1.0 - beta_star;
    }
    validate_dsbm(p);
    return p;
}

}  // namespace magnet
