#pragma once

// The spectral network: a stack of Chebyshev convolution layers over the
// scaled normalized magnetic Laplacian with complex ReLU activations,
// followed by unwinding into real coordinates, one dropout layer, and a
// linear softmax head. Node classification scores every vertex; link
// prediction scores ordered vertex pairs by concatenating the two unwound
// rows (source first), so reversing a pair changes the input.

#include <string>
#include <vector>

#include "magnet/autodiff.hpp"
#include "magnet/graph.hpp"
#include "magnet/sparse.hpp"

namespace magnet {

enum class TaskKind { node, link };

struct MagNetConfig {
    TaskKind task = TaskKind::node;
    double q = 0.25;
    int cheb_order = 1;            // K: polynomial order per layer
    std::vector<int> hidden = {16, 16};  // layer widths; size = layer count
    int num_classes = 2;
    double dropout = 0.5;
    bool use_biases = true;
    bool shared_theta = false;     // one scalar coefficient per polynomial term
    bool allow_extended_q = false;
};

class MagNetModel {
public:
    // Builds the convolution operator from the graph (normalized magnetic
    // Laplacian at cfg.q shifted by -I, i.e. scaled with lambda_max = 2;
    // zero-degree vertices keep an identity row) and allocates parameters.
    // Parameters start at zero; call initialize() before training.
    MagNetModel(const DirectedGraph& g, MagNetConfig cfg, int in_features);

    void initialize(Rng& rng);

    std::vector<Parameter>& parameters() { return params_; }
    const std::vector<Parameter>& parameters() const { return params_; }
    std::vector<Parameter*> parameter_ptrs();
    long long num_trainable_scalars() const;

    // Logits, num_vertices x num_classes. dropout_rng may be null when
    // training is false.
    RTensor forward_node(Tape& tape, const RealMatrix& features, bool training,
                         Rng* dropout_rng);

    // Logits, pairs.size() x num_classes, for ordered pairs (u, v).
    RTensor forward_link(Tape& tape, const RealMatrix& features,
                         const std::vector<Edge>& pairs, bool training,
                         Rng* dropout_rng);

    const ComplexSparseMatrix& conv_operator() const { return op_; }
    const MagNetConfig& config() const { return cfg_; }
    int in_features() const { return in_features_; }
    int num_vertices() const { return op_.rows(); }

private:
    RTensor trunk(Tape& tape, const RealMatrix& features, bool training,
                  Rng* dropout_rng);

    MagNetConfig cfg_;
    int in_features_ = 0;
    ComplexSparseMatrix op_;
    std::vector<Parameter> params_;
    std::vector<std::vector<int>> layer_theta_idx_;  // per layer, K+1 entries
    std::vector<int> layer_bias_idx_;                // -1 when absent
    int final_weight_idx_ = -1;
    int final_bias_idx_ = -1;
};

}  // namespace magnet
