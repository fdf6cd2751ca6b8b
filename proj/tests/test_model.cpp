#include <cmath>
#include <vector>

#include "doctest.h"
#include "magnet/graph.hpp"
#include "magnet/model.hpp"
#include "magnet/rng.hpp"
#include "magnet/spectral.hpp"

using namespace magnet;

namespace {

DirectedGraph test_graph() {
    Rng rng(11);
    return random_digraph(9, 0.35, rng, true);
}

RealMatrix normal_features(int rows, int cols, std::uint64_t seed) {
    Rng rng(seed);
    RealMatrix m(rows, cols);
    for (double& v : m.a) v = rng.next_normal();
    return m;
}

MagNetConfig base_config() {
    MagNetConfig cfg;
    cfg.task = TaskKind::node;
    cfg.q = 0.25;
    cfg.cheb_order = 2;
    cfg.hidden = {3, 4};
    cfg.num_classes = 2;
    cfg.dropout = 0.0;
    return cfg;
}

}  // namespace

TEST_CASE("trainable scalar count follows the architecture") {
    const DirectedGraph g = test_graph();
    // per conv layer: (K+1) real theta matrices F_in x F_out plus a complex
    // bias row (2 F_out scalars); head: real (2 F_last) x C weight + C bias.
    MagNetConfig cfg = base_config();
    MagNetModel node_model(g, cfg, 1);
    CHECK(node_model.num_trainable_scalars() ==
          (3 * 1 * 3 + 2 * 3) + (3 * 3 * 4 + 2 * 4) + (2 * 4 * 2 + 2));

    cfg.task = TaskKind::link;  // head reads two concatenated vertex rows
    MagNetModel link_model(g, cfg, 1);
    CHECK(link_model.num_trainable_scalars() ==
          (3 * 1 * 3 + 2 * 3) + (3 * 3 * 4 + 2 * 4) + (4 * 4 * 2 + 2));

    cfg.task = TaskKind::node;
    cfg.use_biases = false;
    MagNetModel lean_model(g, cfg, 1);
    CHECK(lean_model.num_trainable_scalars() ==
          3 * 1 * 3 + 3 * 3 * 4 + 2 * 4 * 2);

    cfg.use_biases = true;
    cfg.shared_theta = true;
    cfg.hidden = {2, 2};
    MagNetModel shared_model(g, cfg, 2);
    CHECK(shared_model.num_trainable_scalars() ==
          (3 + 2 * 2) + (3 + 2 * 2) + (2 * 2 * 2 + 2));
}

TEST_CASE("configuration validation") {
    const DirectedGraph g = test_graph();
    MagNetConfig cfg = base_config();
    CHECK_THROWS_AS(MagNetModel(g, cfg, 0), std::invalid_argument);
    cfg.hidden = {};
    CHECK_THROWS_AS(MagNetModel(g, cfg, 1), std::invalid_argument);
    cfg.hidden = {4, -1};
    CHECK_THROWS_AS(MagNetModel(g, cfg, 1), std::invalid_argument);
    cfg = base_config();
    cfg.num_classes = 1;
    CHECK_THROWS_AS(MagNetModel(g, cfg, 1), std::invalid_argument);
    cfg = base_config();
    cfg.cheb_order = -1;
    CHECK_THROWS_AS(MagNetModel(g, cfg, 1), std::invalid_argument);
    cfg = base_config();
    cfg.dropout = 1.0;
    CHECK_THROWS_AS(MagNetModel(g, cfg, 1), std::invalid_argument);
    cfg = base_config();
    cfg.q = 0.3;
    CHECK_THROWS_AS(MagNetModel(g, cfg, 1), std::invalid_argument);
    cfg.allow_extended_q = true;
    CHECK_NOTHROW(MagNetModel(g, cfg, 1));
    cfg = base_config();
    cfg.shared_theta = true;  // widths must all equal the input width
    cfg.hidden = {3, 4};
    CHECK_THROWS_AS(MagNetModel(g, cfg, 3), std::invalid_argument);
    cfg.hidden = {3, 3};
    CHECK_NOTHROW(MagNetModel(g, cfg, 3));
}

TEST_CASE("initialization is seed-deterministic and forward shapes are right") {
    const DirectedGraph g = test_graph();
    const MagNetConfig cfg = base_config();
    MagNetModel a(g, cfg, 2);
    MagNetModel b(g, cfg, 2);
    Rng ra(77), rb(77);
    a.initialize(ra);
    b.initialize(rb);
    for (std::size_t i = 0; i < a.parameters().size(); ++i)
        CHECK(a.parameters()[i].value == b.parameters()[i].value);

    const RealMatrix x = normal_features(9, 2, 5);
    Tape tape;
    const RTensor logits = a.forward_node(tape, x, false, nullptr);
    CHECK(logits->value.rows == 9);
    CHECK(logits->value.cols == 2);
    Tape tape_b;
    const RTensor again = b.forward_node(tape_b, x, false, nullptr);
    CHECK(again->value.a == logits->value.a);
}

TEST_CASE("node model refuses link calls and vice versa") {
    const DirectedGraph g = test_graph();
    MagNetConfig cfg = base_config();
    MagNetModel node_model(g, cfg, 1);
    Rng rng(3);
    node_model.initialize(rng);
    const RealMatrix x = normal_features(9, 1, 5);
    Tape tape;
    CHECK_THROWS_AS(node_model.forward_link(tape, x, {{0, 1}}, false, nullptr),
                    std::logic_error);
    cfg.task = TaskKind::link;
    MagNetModel link_model(g, cfg, 1);
    link_model.initialize(rng);
    CHECK_THROWS_AS(link_model.forward_node(tape, x, false, nullptr),
                    std::logic_error);
}

TEST_CASE("q=0 convolution operator equals the classical one") {
    const DirectedGraph g = test_graph();
    MagNetConfig cfg = base_config();
    cfg.q = 0.0;
    MagNetModel model(g, cfg, 1);
    const ComplexSparseMatrix expected =
        scaled_laplacian(classical_normalized_laplacian(g), 2.0);
    double worst = 0.0;
    model.conv_operator().for_each([&](const ComplexSparseMatrix::Entry& e) {
        worst = std::max(worst, std::abs(e.value - expected.at(e.row, e.col)));
    });
    CHECK(worst == 0.0);
    CHECK(model.conv_operator().is_hermitian(0.0));
}

TEST_CASE("an edgeless graph collapses every vertex to the same logits") {
    // identity rows for isolated vertices make the scaled operator zero, so
    // only the theta_0 path survives and equal features give equal rows
    const DirectedGraph g = make_graph(5, {});
    MagNetConfig cfg = base_config();
    MagNetModel model(g, cfg, 1);
    Rng rng(13);
    model.initialize(rng);
    RealMatrix x(5, 1);
    for (double& v : x.a) v = 1.5;
    Tape tape;
    const RTensor logits = model.forward_node(tape, x, false, nullptr);
    for (int i = 1; i < 5; ++i)
        for (int c = 0; c < 2; ++c)
            CHECK(logits->value.at(i, c) == doctest::Approx(logits->value.at(0, c)).epsilon(1e-14));
}

TEST_CASE("swapping an ordered pair changes the link logits") {
    const DirectedGraph g = test_graph();
    MagNetConfig cfg = base_config();
    cfg.task = TaskKind::link;
    cfg.num_classes = 3;
    MagNetModel model(g, cfg, 2);
    Rng rng(17);
    model.initialize(rng);
    const RealMatrix x = normal_features(9, 2, 7);
    Tape tape;
    const RTensor fwd = model.forward_link(tape, x, {{0, 4}}, false, nullptr);
    Tape tape2;
    const RTensor rev = model.forward_link(tape2, x, {{4, 0}}, false, nullptr);
    double diff = 0.0;
    for (int c = 0; c < 3; ++c)
        diff = std::max(diff,
                        std::abs(fwd->value.at(0, c) - rev->value.at(0, c)));
    CHECK(diff > 1e-6);
}

TEST_CASE("every parameter receives gradient through the node loss") {
    const DirectedGraph g = test_graph();
    MagNetConfig cfg = base_config();
    cfg.dropout = 0.5;
    MagNetModel model(g, cfg, 2);
    Rng rng(19);
    model.initialize(rng);
    // biases start at zero; nudge them off so the relu mask is generic
    for (Parameter& p : model.parameters())
        for (double& v : p.grad) v = 0.0;
    const RealMatrix x = normal_features(9, 2, 23);
    std::vector<int> labels(9);
    Rng lab(29);
    for (int& l : labels) l = static_cast<int>(lab.next_below(2));
    Tape tape;
    Rng drop(stream_rng(31, Stream::dropout).next_u64());
    const RTensor logits = model.forward_node(tape, x, true, &drop);
    std::vector<int> rows(9);
    for (int i = 0; i < 9; ++i) rows[static_cast<std::size_t>(i)] = i;
    softmax_cross_entropy(tape, logits, labels, rows);
    tape.backward();
    for (Parameter& p : model.parameters()) {
        double norm = 0.0;
        for (const double v : p.grad) norm += std::abs(v);
        INFO("parameter " << p.name);
        CHECK(norm > 0.0);
    }
}

TEST_CASE("dropout only perturbs training-mode forwards") {
    const DirectedGraph g = test_graph();
    MagNetConfig cfg = base_config();
    cfg.dropout = 0.5;
    MagNetModel model(g, cfg, 1);
    Rng rng(37);
    model.initialize(rng);
    const RealMatrix x = normal_features(9, 1, 41);
    Tape t1, t2, t3;
    const RTensor eval1 = model.forward_node(t1, x, false, nullptr);
    const RTensor eval2 = model.forward_node(t2, x, false, nullptr);
    CHECK(eval1->value.a == eval2->value.a);
    Rng drop_a(43), drop_b(44);
    Tape t4, t5;
    const RTensor train_a = model.forward_node(t4, x, true, &drop_a);
    const RTensor train_b = model.forward_node(t5, x, true, &drop_b);
    CHECK(train_a->value.a != train_b->value.a);
}
