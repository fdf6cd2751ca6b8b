#include "magnet/model.hpp"

#include <stdexcept>

#include "magnet/spectral.hpp"

namespace magnet {

MagNetModel::MagNetModel(const DirectedGraph& g, MagNetConfig cfg,
                         int in_features)
    : cfg_(std::move(cfg)), in_features_(in_features) {
    if (in_features_ <= 0)
        throw std::invalid_argument("model needs >= 1 input feature");
    if (cfg_.hidden.empty())
        throw std::invalid_argument("model needs >= 1 convolution layer");
    for (int w : cfg_.hidden)
        if (w <= 0) throw std::invalid_argument("layer widths must be positive");
    if (cfg_.num_classes < 2)
        throw std::invalid_argument("need >= 2 classes");
    if (cfg_.cheb_order < 0)
        throw std::invalid_argument("polynomial order must be >= 0");
    if (cfg_.dropout < 0.0 || cfg_.dropout >= 1.0)
        throw std::invalid_argument("dropout must be in [0, 1)");
    validate_q(cfg_.q, cfg_.allow_extended_q);
    if (cfg_.shared_theta) {
        int width = in_features_;
        for (int w : cfg_.hidden)
            if (w != width)
                throw std::invalid_argument(
                    "shared coefficients need equal layer widths");
    }

    op_ = scaled_laplacian(
        build_laplacian(g, cfg_.q, Normalization::normalized,
                        cfg_.allow_extended_q, IsolatedPolicy::identity_row)
            .matrix,
        /*lambda_max=*/2.0);

    const int num_layers = static_cast<int>(cfg_.hidden.size());
    int f_prev = in_features_;
    for (int l = 0; l < num_layers; ++l) {
        const int f_out = cfg_.hidden[l];
        std::vector<int> theta_idx;
        for (int k = 0; k <= cfg_.cheb_order; ++k) {
            const std::string name = "layer" + std::to_string(l + 1) +
                                     ".theta" + std::to_string(k);
            params_.push_back(cfg_.shared_theta
                                  ? Parameter::real(name, 1, 1)
                                  : Parameter::real(name, f_prev, f_out));
            theta_idx.push_back(static_cast<int>(params_.size()) - 1);
        }
        layer_theta_idx_.push_back(std::move(theta_idx));
        if (cfg_.use_biases) {
            params_.push_back(Parameter::complex(
                "layer" + std::to_string(l + 1) + ".bias", 1, f_out));
            layer_bias_idx_.push_back(static_cast<int>(params_.size()) - 1);
        } else {
            layer_bias_idx_.push_back(-1);
        }
        f_prev = f_out;
    }

    const int head_in =
        (cfg_.task == TaskKind::link ? 4 : 2) * cfg_.hidden.back();
    params_.push_back(
        Parameter::real("final.weight", head_in, cfg_.num_classes));
    final_weight_idx_ = static_cast<int>(params_.size()) - 1;
    if (cfg_.use_biases) {
        params_.push_back(Parameter::real("final.bias", 1, cfg_.num_classes));
        final_bias_idx_ = static_cast<int>(params_.size()) - 1;
    }
}

void MagNetModel::initialize(Rng& rng) {
    // Fixed order: convolution coefficients layer by layer, then the head.
    for (const auto& layer : layer_theta_idx_)
        for (int idx : layer) init_glorot(params_[idx], rng);
    init_glorot(params_[final_weight_idx_], rng);
    for (int idx : layer_bias_idx_)
        if (idx >= 0) init_zero(params_[idx]);
    if (final_bias_idx_ >= 0) init_zero(params_[final_bias_idx_]);
}

std::vector<Parameter*> MagNetModel::parameter_ptrs() {
    std::vector<Parameter*> out;
    out.reserve(params_.size());
    for (Parameter& p : params_) out.push_back(&p);
    return out;
}

long long MagNetModel::num_trainable_scalars() const {
    long long total = 0;
    for (const Parameter& p : params_)
        if (p.trainable) total += static_cast<long long>(p.size());
    return total;
}

RTensor MagNetModel::trunk(Tape& tape, const RealMatrix& features,
                           bool training, Rng* dropout_rng) {
    if (features.rows != op_.rows() || features.cols != in_features_)
        throw std::invalid_argument("feature matrix shape mismatch");
    if (training && cfg_.dropout > 0.0 && dropout_rng == nullptr)
        throw std::invalid_argument("training forward needs a dropout stream");

    CTensor h = lift_to_complex(features);
    for (std::size_t l = 0; l < layer_theta_idx_.size(); ++l) {
        std::vector<Parameter*> thetas;
        for (int idx : layer_theta_idx_[l]) thetas.push_back(&params_[idx]);
        Parameter* bias =
            layer_bias_idx_[l] >= 0 ? &params_[layer_bias_idx_[l]] : nullptr;
        h = cheb_layer_forward(tape, op_, thetas, bias, h,
                               /*activation=*/true, cfg_.shared_theta);
    }
    RTensor u = unwind(tape, h);
    if (training && cfg_.dropout > 0.0)
        u = dropout(tape, u, cfg_.dropout, *dropout_rng, training);
    return u;
}

RTensor MagNetModel::forward_node(Tape& tape, const RealMatrix& features,
                                  bool training, Rng* dropout_rng) {
    if (cfg_.task != TaskKind::node)
        throw std::logic_error("model was built for link prediction");
    RTensor u = trunk(tape, features, training, dropout_rng);
    Parameter* bias =
        final_bias_idx_ >= 0 ? &params_[final_bias_idx_] : nullptr;
    return linear(tape, u, &params_[final_weight_idx_], bias);
}

RTensor MagNetModel::forward_link(Tape& tape, const RealMatrix& features,
                                  const std::vector<Edge>& pairs, bool training,
                                  Rng* dropout_rng) {
    if (cfg_.task != TaskKind::link)
        throw std::logic_error("model was built for node classification");
    if (pairs.empty())
        throw std::invalid_argument("forward_link needs >= 1 pair");
    RTensor u = trunk(tape, features, training, dropout_rng);
    RTensor cat = pair_concat(tape, u, pairs);
    Parameter* bias =
        final_bias_idx_ >= 0 ? &params_[final_bias_idx_] : nullptr;
    return linear(tape, cat, &params_[final_weight_idx_], bias);
}

}  // namespace magnet
