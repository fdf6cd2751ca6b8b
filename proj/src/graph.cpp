#include "magnet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "magnet/rng.hpp"

namespace magnet {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void validate_q(double q, bool allow_extended_q) {
    if (!(q >= 0.0))
        throw std::invalid_argument("charge parameter q must be >= 0");
    if (!allow_extended_q && q > 0.25)
        throw std::invalid_argument(
            "charge parameter q outside [0, 0.25]; pass the extended-q flag "
            "to allow larger values");
}

bool DirectedGraph::has_edge(int u, int v) const {
    return std::binary_search(edges.begin(), edges.end(), Edge{u, v});
}

DirectedGraph make_graph(int num_vertices, std::vector<Edge> edges) {
    if (num_vertices < 0)
        throw std::invalid_argument("vertex count must be >= 0");
    for (const auto& [u, v] : edges) {
        if (u < 0 || u >= num_vertices || v < 0 || v >= num_vertices)
            throw std::invalid_argument("edge endpoint out of range");
        if (u == v) throw std::invalid_argument("self-loops are not allowed");
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return DirectedGraph{num_vertices, std::move(edges)};
}

DirectedGraph read_edge_list(std::istream& in) {
    std::vector<Edge> edges;
    int declared_vertices = -1;
    int max_index = -1;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line[start] == '#') {
            std::istringstream c(line.substr(start + 1));
            std::string word;
            if (c >> word && word == "vertices:") {
                long long n;
                if (c >> n) declared_vertices = static_cast<int>(n);
            }
            continue;
        }
        std::istringstream ls(line);
        long long u, v;
        if (!(ls >> u >> v)) {
            throw std::invalid_argument("edge list parse error at line " +
                                        std::to_string(line_no) + ": '" + line +
                                        "'");
        }
        std::string trailing;
        if (ls >> trailing) {
            throw std::invalid_argument("edge list parse error at line " +
                                        std::to_string(line_no) +
                                        ": trailing tokens");
        }
        if (u < 0 || v < 0)
            throw std::invalid_argument("negative vertex index at line " +
                                        std::to_string(line_no));
        if (u == v)
            throw std::invalid_argument("self-loop at line " +
                                        std::to_string(line_no));
        edges.push_back({static_cast<int>(u), static_cast<int>(v)});
        max_index = std::max(max_index, static_cast<int>(std::max(u, v)));
    }
    const int n = declared_vertices >= 0 ? declared_vertices : max_index + 1;
    if (max_index >= n)
        throw std::invalid_argument(
            "edge references vertex beyond declared vertex count");
    return make_graph(n, std::move(edges));
}

DirectedGraph read_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open edge list: " + path);
    return read_edge_list(in);
}

void write_edge_list(const DirectedGraph& g, std::ostream& out) {
    out << "# vertices: " << g.num_vertices << "\n";
    for (const auto& [u, v] : g.edges) out << u << "\t" << v << "\n";
}

void write_edge_list_file(const DirectedGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_edge_list(g, out);
}

DirectedGraph make_directed_cycle(int n) {
    if (n < 3) throw std::invalid_argument("cycle needs at least 3 vertices");
    std::vector<Edge> edges;
    edges.reserve(n);
    for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
    return make_graph(n, std::move(edges));
}

DirectedGraph make_directed_star(int n, bool edges_from_center) {
    if (n < 2) throw std::invalid_argument("star needs at least 2 vertices");
    std::vector<Edge> edges;
    edges.reserve(n - 1);
    for (int j = 1; j < n; ++j) {
        if (edges_from_center)
            edges.push_back({0, j});
        else
            edges.push_back({j, 0});
    }
    return make_graph(n, std::move(edges));
}

DirectedGraph reverse_graph(const DirectedGraph& g) {
    std::vector<Edge> edges;
    edges.reserve(g.edges.size());
    for (const auto& [u, v] : g.edges) edges.push_back({v, u});
    return make_graph(g.num_vertices, std::move(edges));
}

DirectedGraph random_digraph(int n, double edge_prob, Rng& rng,
                             bool ensure_no_isolated) {
    if (n < 2) throw std::invalid_argument("random digraph needs n >= 2");
    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (u != v && rng.next_bernoulli(edge_prob)) edges.push_back({u, v});
    if (ensure_no_isolated) {
        std::vector<char> touched(n, 0);
        for (const auto& [u, v] : edges) touched[u] = touched[v] = 1;
        for (int u = 0; u < n; ++u) {
            if (touched[u]) continue;
            int v = static_cast<int>(rng.next_below(n - 1));
            if (v >= u) ++v;
            if (rng.next_bernoulli(0.5))
                edges.push_back({u, v});
            else
                edges.push_back({v, u});
            touched[u] = touched[v] = 1;
        }
    }
    return make_graph(n, std::move(edges));
}

std::pair<std::vector<int>, int> undirected_components(const DirectedGraph& g) {
    std::vector<std::vector<int>> adj(g.num_vertices);
    for (const auto& [u, v] : g.edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<int> comp(g.num_vertices, -1);
    int count = 0;
    std::vector<int> stack;
    for (int s = 0; s < g.num_vertices; ++s) {
        if (comp[s] >= 0) continue;
        comp[s] = count;
        stack.push_back(s);
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v : adj[u]) {
                if (comp[v] < 0) {
                    comp[v] = count;
                    stack.push_back(v);
                }
            }
        }
        ++count;
    }
    return {std::move(comp), count};
}

ComplexSparseMatrix symmetrized_adjacency(const DirectedGraph& g) {
    SparseBuilder b(g.num_vertices, g.num_vertices);
    for (const auto& [u, v] : g.edges) {
        b.add(u, v, {0.5, 0.0});
        b.add(v, u, {0.5, 0.0});
    }
    return b.build(/*hermitian_hint=*/true);
}

std::vector<double> symmetrized_degrees(const DirectedGraph& g) {
    std::vector<double> deg(g.num_vertices, 0.0);
    for (const auto& [u, v] : g.edges) {
        deg[u] += 0.5;
        deg[v] += 0.5;
    }
    return deg;
}

ComplexSparseMatrix phase_matrix(const DirectedGraph& g, double q) {
    validate_q(q, /*allow_extended_q=*/true);
    SparseBuilder b(g.num_vertices, g.num_vertices);
    for (const auto& [u, v] : g.edges) {
        if (g.has_edge(v, u)) {
            if (u < v) {  // reciprocal pair: explicit zeros, added once
                b.add(u, v, {0.0, 0.0});
                b.add(v, u, {0.0, 0.0});
            }
        } else {
            b.add(u, v, {kTwoPi * q, 0.0});
            b.add(v, u, {-kTwoPi * q, 0.0});
        }
    }
    // keep explicit zeros: support must match the symmetrized adjacency
    return b.build(/*hermitian_hint=*/false, /*drop_tol=*/-1.0);
}

ComplexSparseMatrix hermitian_adjacency(const DirectedGraph& g, double q,
                                        bool allow_extended_q) {
    validate_q(q, allow_extended_q);
    SparseBuilder b(g.num_vertices, g.num_vertices);
    for (const auto& [u, v] : g.edges) {
        if (g.has_edge(v, u)) {
            // reciprocal pair: weight 1, zero phase; add half per direction
            b.add(u, v, {0.5, 0.0});
            b.add(v, u, {0.5, 0.0});
        } else {
            const double th = kTwoPi * q;
            b.add(u, v, cdouble{0.5 * std::cos(th), 0.5 * std::sin(th)});
            b.add(v, u, cdouble{0.5 * std::cos(th), -0.5 * std::sin(th)});
        }
    }
    return b.build(/*hermitian_hint=*/true);
}

}  // namespace magnet
