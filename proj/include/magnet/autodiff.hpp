#pragma once

// Reverse-mode automatic differentiation over complex feature matrices,
// specialized to the handful of primitives the network needs. Complex
// gradients are the independent gradients of real and imaginary parts
// (each complex scalar is two real coordinates), so the adjoint of applying
// a fixed complex operator multiplies the upstream gradient by the
// operator's conjugate transpose.

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "magnet/rng.hpp"
#include "magnet/sparse.hpp"

namespace magnet {

struct RealMatrix {
    int rows = 0, cols = 0;
    std::vector<double> a;  // row-major

    RealMatrix() = default;
    RealMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

struct ComplexFeatureMatrix {
    int rows = 0, cols = 0;
    std::vector<double> re, im;  // planar, row-major

    ComplexFeatureMatrix() = default;
    ComplexFeatureMatrix(int r, int c)
        : rows(r), cols(c),
          re(static_cast<std::size_t>(r) * c, 0.0),
          im(static_cast<std::size_t>(r) * c, 0.0) {}
    std::size_t index(int r, int c) const {
        return static_cast<std::size_t>(r) * cols + c;
    }
    cdouble at(int r, int c) const { return {re[index(r, c)], im[index(r, c)]}; }
    void set(int r, int c, cdouble v) {
        re[index(r, c)] = v.real();
        im[index(r, c)] = v.imag();
    }
};

// A trainable (or frozen) tensor. Complex parameters store the real plane
// followed by the imaginary plane; real parameters store rows*cols values.
struct Parameter {
    std::string name;
    int rows = 0, cols = 0;
    bool is_complex = false;
    bool trainable = true;
    std::vector<double> value;
    std::vector<double> grad;

    static Parameter real(std::string name, int rows, int cols);
    static Parameter complex(std::string name, int rows, int cols);
    std::size_t size() const { return value.size(); }
    void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }
};

void init_glorot(Parameter& p, Rng& rng);  // uniform, fan-based; re/im independently
void init_zero(Parameter& p);

struct CNode {
    ComplexFeatureMatrix value;
    ComplexFeatureMatrix grad;  // allocated lazily
    void ensure_grad();
};
struct RNode {
    RealMatrix value;
    RealMatrix grad;
    void ensure_grad();
};
using CTensor = std::shared_ptr<CNode>;
using RTensor = std::shared_ptr<RNode>;

// Ordered record of executed primitives; backward() replays the adjoints in
// exact reverse execution order. With recording disabled the ops skip both
// closure capture and intermediate saving (evaluation mode).
class Tape {
public:
    bool recording = true;
    bool record_relu_masks = false;
    std::vector<char> relu_masks;  // concatenated masks, newest last

    void push(std::function<void()> backward_step) {
        if (recording) steps_.push_back(std::move(backward_step));
    }
    void backward() {
        for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
    }
    void reset() {
        steps_.clear();
        relu_masks.clear();
    }
    std::size_t num_steps() const { return steps_.size(); }

private:
    std::vector<std::function<void()>> steps_;
};

CTensor complex_input(const ComplexFeatureMatrix& value);
CTensor lift_to_complex(const RealMatrix& value);  // zero imaginary part
RTensor real_input(const RealMatrix& value);

// y = op * x for a fixed (non-trainable) sparse operator.
CTensor fixed_operator_apply(Tape& tape, const ComplexSparseMatrix& op,
                             const CTensor& x);

// Chebyshev convolution: out = sum_k T_k(op) x theta_k (+ bias), where the
// theta_k are real (K+1 coefficient matrices of shape F_in x F_out, or a
// single (K+1) x 1 stack of scalars when shared), the optional bias is a
// complex 1 x F_out row, and T_k follows T_0 = I, T_1 = op,
// T_k = 2 op T_{k-1} - T_{k-2}. Powers T_k(op) x are computed once and
// reused across output channels.
CTensor cheb_conv(Tape& tape, const ComplexSparseMatrix& op,
                  const std::vector<Parameter*>& thetas, Parameter* bias,
                  const CTensor& x, bool shared_theta = false);

// Complex ReLU: passes z exactly when Re z > 0, or Re z == 0 and Im z < 0
// (the half-plane -pi/2 <= arg z < pi/2, with sigma(0) = 0); the gradient
// passes through the same mask.
CTensor complex_relu(Tape& tape, const CTensor& x);

// cheb_conv followed (optionally) by the complex ReLU.
CTensor cheb_layer_forward(Tape& tape, const ComplexSparseMatrix& op,
                           const std::vector<Parameter*>& thetas,
                           Parameter* bias, const CTensor& x,
                           bool activation = true, bool shared_theta = false);

// N x F complex -> N x 2F real, real parts then imaginary parts.
RTensor unwind(Tape& tape, const CTensor& x);

// Inverted dropout: entries kept with probability 1-p are scaled by 1/(1-p).
// Identity when training is false. The mask comes from mask_rng so a fixed
// seed reproduces the mask exactly.
RTensor dropout(Tape& tape, const RTensor& x, double p, Rng& mask_rng,
                bool training);

// x (N x F_in) * W (F_in x F_out) + bias row (optional).
RTensor linear(Tape& tape, const RTensor& x, Parameter* weight,
               Parameter* bias);

// Gathers rows u and v for each ordered pair and concatenates them:
// P x (2 * F). The adjoint scatter-adds gradients back to the rows.
RTensor pair_concat(Tape& tape, const RTensor& h,
                    const std::vector<std::pair<int, int>>& pairs);

// Row-wise softmax (no tape; prediction helper).
RealMatrix softmax_rows(const RealMatrix& logits);

// Mean cross-entropy over the given rows with row-wise max subtraction.
// Returns the loss and the full softmax probability matrix; backward seeds
// d loss / d logits = (p - onehot) / |rows| on the given rows.
struct LossResult {
    double loss = 0.0;
    RealMatrix probs;
};
LossResult softmax_cross_entropy(Tape& tape, const RTensor& logits,
                                 const std::vector<int>& labels,
                                 const std::vector<int>& rows);

// Adam with classical (gradient-side) L2 weight decay.
struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 0.0;
};

class Adam {
public:
    Adam(AdamConfig cfg, std::vector<Parameter*> params);
    void step();
    const AdamConfig& config() const { return cfg_; }

private:
    AdamConfig cfg_;
    std::vector<Parameter*> params_;
    std::vector<std::vector<double>> m_, v_;
    long long t_ = 0;
};

// Central-difference gradient check. `eval` must recompute the forward loss
// at the current parameter values and report the concatenated ReLU masks of
// that evaluation; coordinates whose +h/-h evaluations disagree on any mask
// bit sit at an activation boundary and are excluded. Analytic gradients are
// read from the parameters' grad buffers, which the caller fills beforehand.
// When the total coordinate count exceeds max_coords, a deterministic
// subsample of max_coords coordinates is checked.
struct FdEval {
    double loss = 0.0;
    std::vector<char> relu_masks;
};
struct FdCheckResult {
    double max_rel_error = 0.0;
    std::size_t coords_checked = 0;
    std::size_t coords_excluded = 0;
};
FdCheckResult finite_difference_check(
    const std::function<FdEval()>& eval, const std::vector<Parameter*>& params,
    double step = 1e-6, std::size_t max_coords = 10000,
    std::uint64_t subsample_seed = 0);

// Text checkpoint: versioned header, then one named array per parameter with
// shape and kind; values at 17 significant digits so doubles round-trip
// exactly.
void save_checkpoint(const std::string& path,
                     const std::vector<Parameter>& params);
void load_checkpoint(const std::string& path, std::vector<Parameter>& params);

}  // namespace magnet
