#include <cmath>
#include <complex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "magnet/graph.hpp"
#include "magnet/rng.hpp"

using namespace magnet;

TEST_CASE("make_graph sorts, deduplicates and validates") {
    const DirectedGraph g = make_graph(4, {{2, 1}, {0, 3}, {2, 1}, {0, 1}});
    CHECK(g.num_vertices == 4);
    CHECK(g.edges == std::vector<Edge>{{0, 1}, {0, 3}, {2, 1}});
    CHECK(g.has_edge(2, 1));
    CHECK_FALSE(g.has_edge(1, 2));

    CHECK_THROWS_WITH_AS(make_graph(3, {{0, 0}}), "self-loops are not allowed",
                         std::invalid_argument);
    CHECK_THROWS_AS(make_graph(3, {{0, 3}}), std::invalid_argument);
    CHECK_THROWS_AS(make_graph(3, {{-1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(make_graph(-1, {}), std::invalid_argument);
}

TEST_CASE("edge list text round trip with declared vertex count") {
    const DirectedGraph g = make_graph(5, {{0, 1}, {3, 2}});
    std::ostringstream out;
    write_edge_list(g, out);
    std::istringstream in(out.str());
    CHECK(read_edge_list(in) == g);
    // the isolated vertex 4 survives only through the declaration
    CHECK(out.str().find("# vertices: 5") != std::string::npos);
}

TEST_CASE("edge list reader handles comments and reports line numbers") {
    {
        std::istringstream in("# a comment\n\n0\t1\n2\t0\n");
        const DirectedGraph g = read_edge_list(in);
        CHECK(g.num_vertices == 3);
        CHECK(g.edges == std::vector<Edge>{{0, 1}, {2, 0}});
    }
    {
        std::istringstream in("0\t1\n1\t1\n");
        CHECK_THROWS_WITH_AS(read_edge_list(in), "self-loop at line 2",
                             std::invalid_argument);
    }
    {
        std::istringstream in("0\t1\n-2\t1\n");
        CHECK_THROWS_WITH_AS(read_edge_list(in), "negative vertex index at line 2",
                             std::invalid_argument);
    }
    {
        std::istringstream in("0\t1\t9\n");
        CHECK_THROWS_AS(read_edge_list(in), std::invalid_argument);
    }
    {
        std::istringstream in("# vertices: 2\n0\t5\n");
        CHECK_THROWS_WITH_AS(read_edge_list(in),
                             "edge references vertex beyond declared vertex count",
                             std::invalid_argument);
    }
    {
        std::istringstream in("zero one\n");
        CHECK_THROWS_AS(read_edge_list(in), std::invalid_argument);
    }
}

TEST_CASE("fixtures have the expected shapes") {
    const DirectedGraph c = make_directed_cycle(5);
    CHECK(c.num_vertices == 5);
    CHECK(c.num_edges() == 5);
    CHECK(c.has_edge(4, 0));
    CHECK(c.has_edge(0, 1));

    const DirectedGraph s_out = make_directed_star(4, true);
    CHECK(s_out.edges == std::vector<Edge>{{0, 1}, {0, 2}, {0, 3}});
    const DirectedGraph s_in = make_directed_star(4, false);
    CHECK(s_in.edges == std::vector<Edge>{{1, 0}, {2, 0}, {3, 0}});

    CHECK(reverse_graph(s_out) == s_in);
    CHECK(reverse_graph(reverse_graph(c)) == c);

    CHECK_THROWS_AS(make_directed_cycle(2), std::invalid_argument);
    CHECK_THROWS_AS(make_directed_star(1, true), std::invalid_argument);
}

TEST_CASE("random digraphs are valid, reproducible and repair isolation") {
    Rng rng_a(5), rng_b(5);
    const DirectedGraph a = random_digraph(20, 0.1, rng_a, true);
    const DirectedGraph b = random_digraph(20, 0.1, rng_b, true);
    CHECK(a == b);
    std::vector<int> touched(20, 0);
    for (const Edge& e : a.edges) {
        CHECK(e.first != e.second);
        touched[static_cast<std::size_t>(e.first)] = 1;
        touched[static_cast<std::size_t>(e.second)] = 1;
    }
    for (int t : touched) CHECK(t == 1);  // ensure_no_isolated
}

TEST_CASE("undirected components ignore edge direction") {
    const DirectedGraph g = make_graph(6, {{0, 1}, {2, 1}, {4, 5}});
    const auto [comp, count] = undirected_components(g);
    CHECK(count == 3);  // {0,1,2}, {3}, {4,5}
    CHECK(comp[0] == comp[1]);
    CHECK(comp[1] == comp[2]);
    CHECK(comp[4] == comp[5]);
    CHECK(comp[0] != comp[3]);
    CHECK(comp[3] != comp[4]);
}

TEST_CASE("symmetrized adjacency carries 1/2 per direction") {
    // 0->1 single direction, 1<->2 reciprocal
    const DirectedGraph g = make_graph(3, {{0, 1}, {1, 2}, {2, 1}});
    const ComplexSparseMatrix a = symmetrized_adjacency(g);
    CHECK(a.at(0, 1) == cdouble{0.5, 0.0});
    CHECK(a.at(1, 0) == cdouble{0.5, 0.0});
    CHECK(a.at(1, 2) == cdouble{1.0, 0.0});
    CHECK(a.at(2, 1) == cdouble{1.0, 0.0});
    CHECK(a.at(0, 2) == cdouble{0.0, 0.0});
    CHECK(a.is_hermitian(0.0));

    const std::vector<double> deg = symmetrized_degrees(g);
    CHECK(deg == std::vector<double>{0.5, 1.5, 1.0});
}

TEST_CASE("in-star degrees match the hand computation") {
    const DirectedGraph g = make_directed_star(4, true);
    const std::vector<double> deg = symmetrized_degrees(g);
    CHECK(deg == std::vector<double>{1.5, 0.5, 0.5, 0.5});
}

TEST_CASE("phase matrix is antisymmetric with explicit reciprocal zeros") {
    const DirectedGraph g = make_graph(3, {{0, 1}, {1, 2}, {2, 1}});
    const double q = 0.1;
    const ComplexSparseMatrix theta = phase_matrix(g, q);
    const double expect = 2.0 * 3.14159265358979323846 * q;
    CHECK(theta.at(0, 1).real() == doctest::Approx(expect));
    CHECK(theta.at(1, 0).real() == doctest::Approx(-expect));
    // reciprocal pair: phases cancel but the entry must exist in the support
    CHECK(theta.at(1, 2) == cdouble{0.0, 0.0});
    bool saw_reciprocal_entry = false;
    theta.for_each([&](const ComplexSparseMatrix::Entry& e) {
        if (e.row == 1 && e.col == 2) saw_reciprocal_entry = true;
    });
    CHECK(saw_reciprocal_entry);
}

TEST_CASE("hermitian adjacency phases single edges and keeps reciprocal real") {
    const DirectedGraph g = make_graph(3, {{0, 1}, {1, 2}, {2, 1}});
    const ComplexSparseMatrix h = hermitian_adjacency(g, 0.25);
    CHECK(h.at(0, 1).real() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(h.at(0, 1).imag() == doctest::Approx(0.5));
    CHECK(h.at(1, 0).imag() == doctest::Approx(-0.5));
    CHECK(h.at(1, 2) == cdouble{1.0, 0.0});
    CHECK(h.is_hermitian(1e-15));

    const ComplexSparseMatrix h0 = hermitian_adjacency(g, 0.0);
    CHECK(h0.at(0, 1) == cdouble{0.5, 0.0});
}

TEST_CASE("charge parameter validation") {
    const DirectedGraph g = make_graph(2, {{0, 1}});
    CHECK_THROWS_AS(hermitian_adjacency(g, -0.01), std::invalid_argument);
    CHECK_THROWS_AS(hermitian_adjacency(g, 0.26), std::invalid_argument);
    CHECK_NOTHROW(hermitian_adjacency(g, 0.26, true));
    CHECK_THROWS_AS(hermitian_adjacency(g, -0.01, true), std::invalid_argument);
    CHECK_NOTHROW(hermitian_adjacency(g, 0.25));
    CHECK_NOTHROW(hermitian_adjacency(g, 0.0));
}
