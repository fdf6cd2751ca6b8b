#include "magnet/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace magnet {

namespace {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open: " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

bool is_comment_or_blank(const std::string& line) {
    const std::size_t start = line.find_first_not_of(" \t\r");
    return start == std::string::npos || line[start] == '#';
}

}  // namespace

std::vector<int> read_labels_file(const std::string& path, int num_vertices) {
    std::ifstream in = open_in(path);
    std::vector<int> labels(num_vertices, -1);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_comment_or_blank(line)) continue;
        std::istringstream ls(line);
        long long v, c;
        if (!(ls >> v >> c) || v < 0 || v >= num_vertices || c < 0)
            throw std::invalid_argument("label parse error at line " +
                                        std::to_string(line_no) + " of " + path);
        if (labels[v] != -1)
            throw std::invalid_argument("duplicate label for vertex " +
                                        std::to_string(v) + " in " + path);
        labels[v] = static_cast<int>(c);
    }
    for (int v = 0; v < num_vertices; ++v)
        if (labels[v] < 0)
            throw std::invalid_argument("missing label for vertex " +
                                        std::to_string(v) + " in " + path);
    return labels;
}

void write_labels_file(const std::string& path, const std::vector<int>& labels) {
    std::ofstream out = open_out(path);
    for (std::size_t v = 0; v < labels.size(); ++v)
        out << v << "\t" << labels[v] << "\n";
}

RealMatrix read_features_file(const std::string& path, int num_vertices) {
    std::ifstream in = open_in(path);
    std::string line;
    int line_no = 0, width = -1;
    std::vector<std::vector<double>> rows(num_vertices);
    std::vector<char> seen(num_vertices, 0);
    while (std::getline(in, line)) {
        ++line_no;
        if (is_comment_or_blank(line)) continue;
        std::istringstream ls(line);
        long long v;
        if (!(ls >> v) || v < 0 || v >= num_vertices)
            throw std::invalid_argument("feature parse error at line " +
                                        std::to_string(line_no) + " of " + path);
        if (seen[v])
            throw std::invalid_argument("duplicate features for vertex " +
                                        std::to_string(v) + " in " + path);
        seen[v] = 1;
        double x;
        while (ls >> x) rows[v].push_back(x);
        if (rows[v].empty())
            throw std::invalid_argument("empty feature row at line " +
                                        std::to_string(line_no) + " of " + path);
        if (width == -1) width = static_cast<int>(rows[v].size());
        if (static_cast<int>(rows[v].size()) != width)
            throw std::invalid_argument("ragged feature rows in " + path);
    }
    for (int v = 0; v < num_vertices; ++v)
        if (!seen[v])
            throw std::invalid_argument("missing features for vertex " +
                                        std::to_string(v) + " in " + path);
    RealMatrix m(num_vertices, width);
    for (int v = 0; v < num_vertices; ++v)
        for (int c = 0; c < width; ++c) m.at(v, c) = rows[v][c];
    return m;
}

void write_features_file(const std::string& path, const RealMatrix& features) {
    std::ofstream out = open_out(path);
    for (int v = 0; v < features.rows; ++v) {
        out << v;
        for (int c = 0; c < features.cols; ++c)
            out << "\t" << format_double(features.at(v, c));
        out << "\n";
    }
}

void write_laplacian_file(const std::string& path, const MagneticLaplacian& l) {
    std::ofstream out = open_out(path);
    out << l.num_vertices << " " << format_double(l.q) << " "
        << (l.normalization == Normalization::normalized ? "normalized"
                                                         : "unnormalized")
        << "\n";
    l.matrix.for_each([&](const ComplexSparseMatrix::Entry& e) {
        out << e.row << " " << e.col << " " << format_double(e.value.real())
            << " " << format_double(e.value.imag()) << "\n";
    });
    if (!out) throw std::runtime_error("write failed: " + path);
}

MagneticLaplacian read_laplacian_file(const std::string& path) {
    std::ifstream in = open_in(path);
    MagneticLaplacian l;
    std::string norm;
    if (!(in >> l.num_vertices >> l.q >> norm))
        throw std::invalid_argument("malformed Laplacian header in " + path);
    if (norm == "normalized")
        l.normalization = Normalization::normalized;
    else if (norm == "unnormalized")
        l.normalization = Normalization::unnormalized;
    else
        throw std::invalid_argument("unknown normalization '" + norm + "' in " +
                                    path);
    SparseBuilder b(l.num_vertices, l.num_vertices);
    int r, c;
    double re, im;
    while (in >> r >> c >> re >> im) b.add(r, c, {re, im});
    l.matrix = b.build(/*hermitian_hint=*/true, /*drop_tol=*/-1.0);
    return l;
}

RealMatrix degree_features(const DirectedGraph& g) {
    RealMatrix m(g.num_vertices, 2);
    for (const auto& [u, v] : g.edges) {
        m.at(v, 0) += 1.0;  // in-degree
        m.at(u, 1) += 1.0;  // out-degree
    }
    return m;
}

namespace {

NodeSplit finish_node_split(std::vector<int> train, std::vector<int> val,
                            std::vector<int> test, std::string scheme,
                            std::uint64_t seed) {
    std::sort(train.begin(), train.end());
    std::sort(val.begin(), val.end());
    std::sort(test.begin(), test.end());
    return NodeSplit{std::move(train), std::move(val), std::move(test),
                     std::move(scheme), seed};
}

}  // namespace

NodeSplit node_split_per_class(const std::vector<int>& labels,
                               int train_per_class, int val_total,
                               std::uint64_t seed) {
    if (train_per_class <= 0 || val_total < 0)
        throw std::invalid_argument("invalid per-class split sizes");
    const int n = static_cast<int>(labels.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng = stream_rng(seed, Stream::split);
    rng.shuffle(order);

    const int num_classes = 1 + *std::max_element(labels.begin(), labels.end());
    std::vector<int> taken(num_classes, 0);
    std::vector<int> train, rest;
    for (int v : order) {
        if (taken[labels[v]] < train_per_class) {
            ++taken[labels[v]];
            train.push_back(v);
        } else {
            rest.push_back(v);
        }
    }
    for (int c = 0; c < num_classes; ++c)
        if (taken[c] < train_per_class)
            throw std::invalid_argument(
                "class " + std::to_string(c) + " has only " +
                std::to_string(taken[c]) + " vertices, need " +
                std::to_string(train_per_class));
    if (static_cast<int>(rest.size()) < val_total)
        throw std::invalid_argument("not enough vertices for validation set");
    std::vector<int> val(rest.begin(), rest.begin() + val_total);
    std::vector<int> test(rest.begin() + val_total, rest.end());
    return finish_node_split(std::move(train), std::move(val), std::move(test),
                             "per_class", seed);
}

NodeSplit node_split_fraction(int num_vertices, double train_frac,
                              double val_frac, std::uint64_t seed) {
    if (train_frac <= 0.0 || val_frac < 0.0 || train_frac + val_frac > 1.0)
        throw std::invalid_argument("invalid split fractions");
    std::vector<int> order(num_vertices);
    std::iota(order.begin(), order.end(), 0);
    Rng rng = stream_rng(seed, Stream::split);
    rng.shuffle(order);
    const double test_frac = 1.0 - train_frac - val_frac;
    const int n_val = static_cast<int>(val_frac * num_vertices);
    const int n_test = static_cast<int>(test_frac * num_vertices);
    const int n_train = num_vertices - n_val - n_test;  // rounding to train
    if (n_train <= 0)
        throw std::invalid_argument("training fraction yields no vertices");
    std::vector<int> train(order.begin(), order.begin() + n_train);
    std::vector<int> val(order.begin() + n_train, order.begin() + n_train + n_val);
    std::vector<int> test(order.begin() + n_train + n_val, order.end());
    return finish_node_split(std::move(train), std::move(val), std::move(test),
                             "fraction", seed);
}

void write_node_split_file(const std::string& path, const NodeSplit& s) {
    json j;
    j["format"] = "magnet-node-split";
    j["version"] = 1;
    j["scheme"] = s.scheme;
    j["seed"] = s.seed;
    j["train"] = s.train;
    j["val"] = s.val;
    j["test"] = s.test;
    std::ofstream out = open_out(path);
    out << j.dump(2) << "\n";
}

NodeSplit read_node_split_file(const std::string& path) {
    std::ifstream in = open_in(path);
    json j;
    in >> j;
    if (j.value("format", "") != "magnet-node-split" || j.value("version", 0) != 1)
        throw std::invalid_argument("not a node split file: " + path);
    NodeSplit s;
    s.scheme = j.at("scheme").get<std::string>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.train = j.at("train").get<std::vector<int>>();
    s.val = j.at("val").get<std::vector<int>>();
    s.test = j.at("test").get<std::vector<int>>();
    return s;
}

std::string to_string(LinkTask t) {
    switch (t) {
        case LinkTask::existence: return "existence";
        case LinkTask::direction: return "direction";
        case LinkTask::three_class: return "three_class";
    }
    throw std::logic_error("unreachable");
}

LinkTask link_task_from_string(const std::string& s) {
    if (s == "existence") return LinkTask::existence;
    if (s == "direction") return LinkTask::direction;
    if (s == "three_class") return LinkTask::three_class;
    throw std::invalid_argument("unknown link task '" + s + "'");
}

namespace {

// Deterministic BFS spanning forest of the undirected support: roots are the
// smallest unvisited vertices, neighbors expand in ascending order. Returns
// the covered unordered adjacencies as (min, max) pairs.
std::vector<Edge> bfs_forest_adjacencies(const DirectedGraph& g) {
    std::vector<std::vector<int>> adj(g.num_vertices);
    for (const auto& [u, v] : g.edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    for (auto& nbrs : adj) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
    std::vector<Edge> tree;
    std::vector<char> visited(g.num_vertices, 0);
    std::vector<int> queue;
    for (int root = 0; root < g.num_vertices; ++root) {
        if (visited[root]) continue;
        visited[root] = 1;
        queue.clear();
        queue.push_back(root);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const int u = queue[head];
            for (int v : adj[u]) {
                if (visited[v]) continue;
                visited[v] = 1;
                tree.push_back({std::min(u, v), std::max(u, v)});
                queue.push_back(v);
            }
        }
    }
    return tree;
}

bool is_reciprocal(const DirectedGraph& g, const Edge& e) {
    return g.has_edge(e.second, e.first);
}

// Presents true edges as ordered pairs: the first half of the (shuffled)
// list keeps its orientation (label 0), the second half is reversed
// (label 1), giving an exact 50/50 balance up to one edge.
void present_direction_pairs(std::vector<Edge> edges, Rng& rng,
                             LinkObservations& obs) {
    rng.shuffle(edges);
    const std::size_t half = (edges.size() + 1) / 2;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (i < half) {
            obs.pairs.push_back(edges[i]);
            obs.labels.push_back(0);
        } else {
            obs.pairs.push_back({edges[i].second, edges[i].first});
            obs.labels.push_back(1);
        }
    }
}

}  // namespace

LinkSplit link_split(const DirectedGraph& g, LinkTask task, double test_frac,
                     double val_frac, bool include_noisy, std::uint64_t seed) {
    if (test_frac < 0.0 || val_frac < 0.0 || test_frac + val_frac >= 1.0)
        throw std::invalid_argument("invalid link split fractions");
    const int m = g.num_edges();
    if (m == 0) throw std::invalid_argument("graph has no edges to split");

    LinkSplit out;
    out.num_vertices = g.num_vertices;
    out.task = task;
    out.include_noisy = include_noisy;
    out.seed = seed;

    // Protected cover: per spanning-forest adjacency keep the
    // lexicographically smallest directed edge realizing it.
    std::set<Edge> protected_set;
    for (const auto& [a, b] : bfs_forest_adjacencies(g)) {
        if (g.has_edge(a, b))
            protected_set.insert({a, b});
        else
            protected_set.insert({b, a});
    }
    out.protected_edges.assign(protected_set.begin(), protected_set.end());

    const bool digons_eligible = task == LinkTask::existence && include_noisy;
    std::vector<Edge> removable;
    for (const Edge& e : g.edges) {
        if (protected_set.count(e)) continue;
        if (!digons_eligible && is_reciprocal(g, e)) continue;
        removable.push_back(e);
    }

    const int n_test = static_cast<int>(std::llround(test_frac * m));
    const int n_val = static_cast<int>(std::llround(val_frac * m));
    if (n_test + n_val > static_cast<int>(removable.size()))
        throw std::invalid_argument(
            "cannot remove " + std::to_string(n_test + n_val) +
            " edges: only " + std::to_string(removable.size()) +
            " are outside the spanning forest and eligible");

    Rng rng = stream_rng(seed, Stream::split);
    rng.shuffle(removable);
    std::vector<Edge> test_edges(removable.begin(), removable.begin() + n_test);
    std::vector<Edge> val_edges(removable.begin() + n_test,
                                removable.begin() + n_test + n_val);
    std::set<Edge> removed(test_edges.begin(), test_edges.end());
    removed.insert(val_edges.begin(), val_edges.end());

    std::vector<Edge> residual_edges;
    for (const Edge& e : g.edges)
        if (!removed.count(e)) residual_edges.push_back(e);
    out.residual = make_graph(g.num_vertices, residual_edges);

    // Training positives follow the same eligibility rules on the residual.
    std::vector<Edge> train_edges;
    for (const Edge& e : out.residual.edges) {
        if (!digons_eligible && is_reciprocal(g, e)) continue;
        train_edges.push_back(e);
    }

    // Negative pairs: not adjacent in the original graph in either direction,
    // distinct across all three sets.
    Rng neg_rng = stream_rng(seed, Stream::negatives);
    std::set<Edge> used_negatives;
    auto sample_negatives = [&](int count) {
        std::vector<Edge> negs;
        long long attempts = 0;
        const long long max_attempts =
            1000LL * count + 1000000LL;
        while (static_cast<int>(negs.size()) < count) {
            if (++attempts > max_attempts)
                throw std::runtime_error(
                    "negative sampling stalled: graph too dense");
            const int u = static_cast<int>(neg_rng.next_below(g.num_vertices));
            int v = static_cast<int>(neg_rng.next_below(g.num_vertices - 1));
            if (v >= u) ++v;
            const Edge e{u, v};
            if (g.has_edge(u, v) || g.has_edge(v, u)) continue;
            if (used_negatives.count(e)) continue;
            used_negatives.insert(e);
            negs.push_back(e);
        }
        return negs;
    };

    auto build_set = [&](const std::vector<Edge>& positives, Rng& shuffle_rng,
                         LinkObservations& obs) {
        switch (task) {
            case LinkTask::existence: {
                for (const Edge& e : positives) {
                    obs.pairs.push_back(e);
                    obs.labels.push_back(0);
                }
                const int per_positive = include_noisy ? 3 : 1;
                for (const Edge& e :
                     sample_negatives(per_positive *
                                      static_cast<int>(positives.size()))) {
                    obs.pairs.push_back(e);
                    obs.labels.push_back(1);
                }
                break;
            }
            case LinkTask::direction:
                present_direction_pairs(positives, shuffle_rng, obs);
                break;
            case LinkTask::three_class: {
                present_direction_pairs(positives, shuffle_rng, obs);
                for (const Edge& e : sample_negatives(
                         static_cast<int>(positives.size()))) {
                    obs.pairs.push_back(e);
                    obs.labels.push_back(2);
                }
                break;
            }
        }
    };

    Rng present_rng = stream_rng(seed, Stream::shuffle);
    build_set(test_edges, present_rng, out.test);
    build_set(val_edges, present_rng, out.val);
    build_set(train_edges, present_rng, out.train);
    return out;
}

void write_link_split_file(const std::string& path, const LinkSplit& s) {
    json j;
    j["format"] = "magnet-link-split";
    j["version"] = 1;
    j["task"] = to_string(s.task);
    j["include_noisy"] = s.include_noisy;
    j["seed"] = s.seed;
    j["num_vertices"] = s.num_vertices;
    auto edges_to_json = [](const std::vector<Edge>& es) {
        json a = json::array();
        for (const auto& [u, v] : es) a.push_back({u, v});
        return a;
    };
    auto obs_to_json = [](const LinkObservations& o) {
        json a = json::array();
        for (std::size_t i = 0; i < o.pairs.size(); ++i)
            a.push_back({o.pairs[i].first, o.pairs[i].second, o.labels[i]});
        return a;
    };
    j["residual_edges"] = edges_to_json(s.residual.edges);
    j["protected"] = edges_to_json(s.protected_edges);
    j["train"] = obs_to_json(s.train);
    j["val"] = obs_to_json(s.val);
    j["test"] = obs_to_json(s.test);
    std::ofstream out = open_out(path);
    out << j.dump(2) << "\n";
}

LinkSplit read_link_split_file(const std::string& path) {
    std::ifstream in = open_in(path);
    json j;
    in >> j;
    if (j.value("format", "") != "magnet-link-split" || j.value("version", 0) != 1)
        throw std::invalid_argument("not a link split file: " + path);
    LinkSplit s;
    s.task = link_task_from_string(j.at("task").get<std::string>());
    s.include_noisy = j.at("include_noisy").get<bool>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.num_vertices = j.at("num_vertices").get<int>();
    auto edges_from_json = [](const json& a) {
        std::vector<Edge> es;
        for (const auto& e : a) es.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
        return es;
    };
    auto obs_from_json = [](const json& a) {
        LinkObservations o;
        for (const auto& e : a) {
            o.pairs.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
            o.labels.push_back(e.at(2).get<int>());
        }
        return o;
    };
    s.residual = make_graph(s.num_vertices,
                            edges_from_json(j.at("residual_edges")));
    s.protected_edges = edges_from_json(j.at("protected"));
    s.train = obs_from_json(j.at("train"));
    s.val = obs_from_json(j.at("val"));
    s.test = obs_from_json(j.at("test"));
    return s;
}

double eval_direction_from_three_class(const RealMatrix& probs,
                                       const std::vector<int>& true_labels) {
    if (probs.cols < 2)
        throw std::invalid_argument("need >= 2 class probabilities");
    if (static_cast<int>(true_labels.size()) != probs.rows)
        throw std::invalid_argument("label count mismatch");
    long long correct = 0, total = 0;
    for (int r = 0; r < probs.rows; ++r) {
        if (true_labels[r] != 0 && true_labels[r] != 1) continue;
        const int pred = probs.at(r, 0) >= probs.at(r, 1) ? 0 : 1;
        correct += pred == true_labels[r] ? 1 : 0;
        ++total;
    }
    if (total == 0)
        throw std::invalid_argument("no true-edge pairs in evaluation set");
    return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace magnet
