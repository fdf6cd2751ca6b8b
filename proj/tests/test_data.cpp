#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <vector>

#include "doctest.h"
#include "magnet/data.hpp"
#include "magnet/dsbm.hpp"
#include "magnet/graph.hpp"
#include "magnet/spectral.hpp"

using namespace magnet;

namespace {

std::vector<int> sorted_union(const NodeSplit& s) {
    std::vector<int> all;
    all.insert(all.end(), s.train.begin(), s.train.end());
    all.insert(all.end(), s.val.begin(), s.val.end());
    all.insert(all.end(), s.test.begin(), s.test.end());
    std::sort(all.begin(), all.end());
    return all;
}

std::set<Edge> edge_set(const DirectedGraph& g) {
    return {g.edges.begin(), g.edges.end()};
}

long long count_label(const LinkObservations& obs, int label) {
    return std::count(obs.labels.begin(), obs.labels.end(), label);
}

DirectedGraph link_test_graph(std::uint64_t seed) {
    const DsbmSample s = sample_dsbm(ordered_meta(80, 2, 0.3, 0.3, 0.2, seed));
    REQUIRE(undirected_components(s.graph).second == 1);
    return s.graph;
}

}  // namespace

TEST_CASE("degree features are (in, out) per vertex") {
    const DirectedGraph g = make_graph(3, {{0, 1}, {1, 2}, {2, 1}});
    const RealMatrix f = degree_features(g);
    REQUIRE(f.rows == 3);
    REQUIRE(f.cols == 2);
    CHECK(f.at(0, 0) == 0.0);
    CHECK(f.at(0, 1) == 1.0);
    CHECK(f.at(1, 0) == 2.0);
    CHECK(f.at(1, 1) == 1.0);
    CHECK(f.at(2, 0) == 1.0);
    CHECK(f.at(2, 1) == 1.0);
}

TEST_CASE("per-class node split takes exact counts from every class") {
    std::vector<int> labels;
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 5 + c; ++i) labels.push_back(c);  // sizes 5, 6, 7
    const NodeSplit s = node_split_per_class(labels, 2, 4, 11);
    CHECK(s.train.size() == 6);
    CHECK(s.val.size() == 4);
    CHECK(s.test.size() == labels.size() - 10);
    std::vector<int> train_counts(3, 0);
    for (const int v : s.train)
        train_counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(v)])] += 1;
    CHECK(train_counts == std::vector<int>{2, 2, 2});

    // disjoint cover of every vertex
    std::vector<int> everything(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        everything[i] = static_cast<int>(i);
    CHECK(sorted_union(s) == everything);
    CHECK(std::is_sorted(s.train.begin(), s.train.end()));
    CHECK(std::is_sorted(s.test.begin(), s.test.end()));

    const NodeSplit again = node_split_per_class(labels, 2, 4, 11);
    CHECK(again.train == s.train);
    CHECK(again.val == s.val);
    const NodeSplit other = node_split_per_class(labels, 2, 4, 12);
    CHECK(other.train != s.train);

    CHECK_THROWS_AS(node_split_per_class(labels, 6, 4, 1),
                    std::invalid_argument);  // class 0 has only 5 members
    CHECK_THROWS_AS(node_split_per_class(labels, 2, 100, 1),
                    std::invalid_argument);  // not enough vertices left
}

TEST_CASE("fraction node split sends the rounding remainder to train") {
    const NodeSplit s = node_split_fraction(10, 0.6, 0.2, 5);
    CHECK(s.train.size() == 6);
    CHECK(s.val.size() == 2);
    CHECK(s.test.size() == 2);
    std::vector<int> everything(10);
    for (int i = 0; i < 10; ++i) everything[static_cast<std::size_t>(i)] = i;
    CHECK(sorted_union(s) == everything);

    // awkward fractions still cover all vertices and favor train
    const NodeSplit odd = node_split_fraction(23, 0.6, 0.2, 5);
    CHECK(odd.train.size() + odd.val.size() + odd.test.size() == 23);
    CHECK(odd.train.size() >= 13);

    CHECK_THROWS_AS(node_split_fraction(10, 0.9, 0.2, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(node_split_fraction(10, -0.1, 0.2, 1),
                    std::invalid_argument);
}

TEST_CASE("node split file round trip") {
    const NodeSplit s = node_split_fraction(12, 0.5, 0.25, 9);
    const std::string path = "node_split_roundtrip.json";
    write_node_split_file(path, s);
    const NodeSplit r = read_node_split_file(path);
    CHECK(r.train == s.train);
    CHECK(r.val == s.val);
    CHECK(r.test == s.test);
    CHECK(r.scheme == s.scheme);
    CHECK(r.seed == s.seed);
    std::remove(path.c_str());
}

TEST_CASE("labels file round trip and validation") {
    const std::vector<int> labels = {1, 0, 2, 2, 1};
    const std::string path = "labels_roundtrip.tsv";
    write_labels_file(path, labels);
    CHECK(read_labels_file(path, 5) == labels);

    FILE* f = fopen(path.c_str(), "w");
    fputs("0\t1\n0\t2\n1\t0\n", f);  // vertex 0 twice, others missing
    fclose(f);
    CHECK_THROWS_AS(read_labels_file(path, 3), std::invalid_argument);

    f = fopen(path.c_str(), "w");
    fputs("0\t1\n7\t0\n", f);  // vertex beyond count
    fclose(f);
    CHECK_THROWS_AS(read_labels_file(path, 2), std::invalid_argument);

    CHECK_THROWS_AS(read_labels_file("no_such_labels.tsv", 2),
                    std::invalid_argument);
    std::remove(path.c_str());
}

TEST_CASE("features file round trip and ragged row rejection") {
    RealMatrix m(2, 3);
    m.at(0, 0) = -1.25;
    m.at(0, 1) = 3.5e-7;
    m.at(0, 2) = 0.1 + 0.2;
    m.at(1, 0) = 42.0;
    m.at(1, 1) = -0.0;
    m.at(1, 2) = 1e300;
    const std::string path = "features_roundtrip.tsv";
    write_features_file(path, m);
    const RealMatrix r = read_features_file(path, 2);
    CHECK(r.a == m.a);  // 17 significant digits round doubles exactly

    FILE* f = fopen(path.c_str(), "w");
    fputs("0\t1.0\t2.0\n1\t3.0\n", f);
    fclose(f);
    CHECK_THROWS_AS(read_features_file(path, 2), std::invalid_argument);
    std::remove(path.c_str());
}

TEST_CASE("laplacian file round trip is bit-stable") {
    Rng rng(3);
    const DirectedGraph g = random_digraph(9, 0.3, rng, true);
    const MagneticLaplacian l =
        build_laplacian(g, 0.15, Normalization::normalized);
    const std::string path = "laplacian_roundtrip.tsv";
    write_laplacian_file(path, l);
    const MagneticLaplacian r = read_laplacian_file(path);
    CHECK(r.q == l.q);
    CHECK(r.normalization == l.normalization);
    CHECK(r.num_vertices == l.num_vertices);
    CHECK(r.matrix.nnz() == l.matrix.nnz());
    double worst = 0.0;
    l.matrix.for_each([&](const ComplexSparseMatrix::Entry& e) {
        worst = std::max(worst, std::abs(e.value - r.matrix.at(e.row, e.col)));
    });
    CHECK(worst == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("link task names round trip") {
    for (const LinkTask t :
         {LinkTask::existence, LinkTask::direction, LinkTask::three_class})
        CHECK(link_task_from_string(to_string(t)) == t);
    CHECK_THROWS_AS(link_task_from_string("both"), std::invalid_argument);
}

TEST_CASE("link split preserves connectivity and removal fractions") {
    const DirectedGraph g = link_test_graph(31);
    const long long e_total = static_cast<long long>(g.edges.size());
    const LinkSplit s = link_split(g, LinkTask::direction, 0.15, 0.05, false, 7);

    CHECK(undirected_components(s.residual).second == 1);
    CHECK(s.num_vertices == g.num_vertices);

    const long long removed =
        e_total - static_cast<long long>(s.residual.edges.size());
    const long long want_test = std::llround(0.15 * static_cast<double>(e_total));
    const long long want_val = std::llround(0.05 * static_cast<double>(e_total));
    CHECK(std::abs(static_cast<long long>(s.test.pairs.size()) - want_test) <= 1);
    CHECK(std::abs(static_cast<long long>(s.val.pairs.size()) - want_val) <= 1);
    CHECK(removed == static_cast<long long>(s.test.pairs.size() + s.val.pairs.size()));

    // protected spanning forest stays inside the residual
    const std::set<Edge> residual_edges = edge_set(s.residual);
    for (const Edge& e : s.protected_edges)
        CHECK(residual_edges.count(e) == 1);

    // removed edges are gone from the residual but preserved in observations
    const std::set<Edge> original = edge_set(g);
    for (std::size_t i = 0; i < s.test.pairs.size(); ++i) {
        const Edge& p = s.test.pairs[i];
        const Edge fwd = (s.test.labels[i] == 0) ? p : Edge{p.second, p.first};
        CHECK(original.count(fwd) == 1);
        CHECK(residual_edges.count(fwd) == 0);
    }

    // determinism and seed sensitivity
    const LinkSplit again = link_split(g, LinkTask::direction, 0.15, 0.05, false, 7);
    CHECK(again.residual.edges == s.residual.edges);
    CHECK(again.test.pairs == s.test.pairs);
    CHECK(again.test.labels == s.test.labels);
    const LinkSplit other = link_split(g, LinkTask::direction, 0.15, 0.05, false, 8);
    CHECK(other.test.pairs != s.test.pairs);
}

TEST_CASE("direction observations balance forward and reversed presentations") {
    const DirectedGraph g = link_test_graph(37);
    const LinkSplit s = link_split(g, LinkTask::direction, 0.15, 0.05, false, 9);
    for (const LinkObservations* obs : {&s.train, &s.val, &s.test}) {
        const long long fwd = count_label(*obs, 0);
        const long long rev = count_label(*obs, 1);
        CHECK(fwd + rev == static_cast<long long>(obs->labels.size()));
        CHECK(std::abs(fwd - rev) <= 1);
    }
}

TEST_CASE("existence observations pair positives with fresh negatives") {
    const DirectedGraph g = link_test_graph(41);
    const LinkSplit s = link_split(g, LinkTask::existence, 0.15, 0.05, false, 13);
    const std::set<Edge> original = edge_set(g);

    std::set<Edge> negatives_seen;
    for (const LinkObservations* obs : {&s.train, &s.val, &s.test}) {
        const long long pos = count_label(*obs, 0);
        const long long neg = count_label(*obs, 1);
        CHECK(std::abs(pos - neg) <= 1);  // 50/50 balance
        for (std::size_t i = 0; i < obs->pairs.size(); ++i) {
            const Edge& p = obs->pairs[i];
            if (obs->labels[i] == 1) {
                // negatives are non-adjacent in either direction and unique
                CHECK(original.count(p) == 0);
                CHECK(original.count({p.second, p.first}) == 0);
                CHECK(negatives_seen.insert(p).second);
            } else {
                CHECK(original.count(p) == 1);
            }
        }
    }
}

TEST_CASE("noisy existence observations use a 25/75 class balance") {
    const DirectedGraph g = link_test_graph(43);
    const LinkSplit s = link_split(g, LinkTask::existence, 0.15, 0.05, true, 17);
    for (const LinkObservations* obs : {&s.train, &s.val, &s.test}) {
        const long long pos = count_label(*obs, 0);
        const long long neg = count_label(*obs, 1);
        CHECK(std::abs(neg - 3 * pos) <= 3);
    }
}

TEST_CASE("three-class observations use a 25/25/50 balance") {
    const DirectedGraph g = link_test_graph(47);
    const LinkSplit s =
        link_split(g, LinkTask::three_class, 0.15, 0.05, false, 19);
    const std::set<Edge> original = edge_set(g);
    for (const LinkObservations* obs : {&s.train, &s.val, &s.test}) {
        const long long fwd = count_label(*obs, 0);
        const long long rev = count_label(*obs, 1);
        const long long non = count_label(*obs, 2);
        CHECK(std::abs(fwd - rev) <= 1);
        CHECK(std::abs(non - (fwd + rev)) <= 1);
        for (std::size_t i = 0; i < obs->pairs.size(); ++i)
            if (obs->labels[i] == 2) {
                CHECK(original.count(obs->pairs[i]) == 0);
                CHECK(original.count({obs->pairs[i].second,
                                      obs->pairs[i].first}) == 0);
            }
    }
}

TEST_CASE("link split file round trip") {
    const DirectedGraph g = link_test_graph(53);
    const LinkSplit s =
        link_split(g, LinkTask::three_class, 0.15, 0.05, false, 23);
    const std::string path = "link_split_roundtrip.json";
    write_link_split_file(path, s);
    const LinkSplit r = read_link_split_file(path);
    CHECK(r.num_vertices == s.num_vertices);
    CHECK(r.residual.edges == s.residual.edges);
    CHECK(r.protected_edges == s.protected_edges);
    CHECK(r.task == s.task);
    CHECK(r.include_noisy == s.include_noisy);
    CHECK(r.seed == s.seed);
    for (const auto& [mine, loaded] :
         {std::pair{&s.train, &r.train}, {&s.val, &r.val}, {&s.test, &r.test}}) {
        CHECK(loaded->pairs == mine->pairs);
        CHECK(loaded->labels == mine->labels);
    }
    std::remove(path.c_str());
}

TEST_CASE("direction accuracy from three-class probabilities") {
    RealMatrix probs(4, 3);
    // row 0: argmax over {0,1} is 1, true 0 -> wrong
    probs.at(0, 0) = 0.2; probs.at(0, 1) = 0.5; probs.at(0, 2) = 0.3;
    // row 1: argmax 1, true 1 -> right
    probs.at(1, 0) = 0.1; probs.at(1, 1) = 0.6; probs.at(1, 2) = 0.3;
    // row 2: true label 2, excluded from the score
    probs.at(2, 0) = 0.9; probs.at(2, 1) = 0.0; probs.at(2, 2) = 0.1;
    // row 3: tie between classes 0 and 1 goes to 0, true 0 -> right
    probs.at(3, 0) = 0.4; probs.at(3, 1) = 0.4; probs.at(3, 2) = 0.2;
    const double acc =
        eval_direction_from_three_class(probs, {0, 1, 2, 0});
    CHECK(acc == doctest::Approx(2.0 / 3.0));
}
