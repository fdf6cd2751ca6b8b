#include "magnet/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace magnet {

namespace {

// C (n x p) += A (n x m) * B (m x p)
void gemm_acc(const double* a, const double* b, double* c, int n, int m, int p) {
    for (int i = 0; i < n; ++i) {
        const double* ai = a + static_cast<std::size_t>(i) * m;
        double* ci = c + static_cast<std::size_t>(i) * p;
        for (int k = 0; k < m; ++k) {
            const double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = b + static_cast<std::size_t>(k) * p;
            for (int j = 0; j < p; ++j) ci[j] += aik * bk[j];
        }
    }
}

// C (m x p) += A^T * B for A (n x m), B (n x p)
void gemm_at_acc(const double* a, const double* b, double* c, int n, int m,
                 int p) {
    for (int i = 0; i < n; ++i) {
        const double* ai = a + static_cast<std::size_t>(i) * m;
        const double* bi = b + static_cast<std::size_t>(i) * p;
        for (int k = 0; k < m; ++k) {
            const double aik = ai[k];
            if (aik == 0.0) continue;
            double* ck = c + static_cast<std::size_t>(k) * p;
            for (int j = 0; j < p; ++j) ck[j] += aik * bi[j];
        }
    }
}

// C (n x m) += A * B^T for A (n x p), B (m x p)
void gemm_bt_acc(const double* a, const double* b, double* c, int n, int m,
                 int p) {
    for (int i = 0; i < n; ++i) {
        const double* ai = a + static_cast<std::size_t>(i) * p;
        double* ci = c + static_cast<std::size_t>(i) * m;
        for (int j = 0; j < m; ++j) {
            const double* bj = b + static_cast<std::size_t>(j) * p;
            double dot = 0.0;
            for (int k = 0; k < p; ++k) dot += ai[k] * bj[k];
            ci[j] += dot;
        }
    }
}

}  // namespace

Parameter Parameter::real(std::string name, int rows, int cols) {
    Parameter p;
    p.name = std::move(name);
    p.rows = rows;
    p.cols = cols;
    p.is_complex = false;
    p.value.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    p.grad.assign(p.value.size(), 0.0);
    return p;
}

Parameter Parameter::complex(std::string name, int rows, int cols) {
    Parameter p;
    p.name = std::move(name);
    p.rows = rows;
    p.cols = cols;
    p.is_complex = true;
    p.value.assign(2 * static_cast<std::size_t>(rows) * cols, 0.0);
    p.grad.assign(p.value.size(), 0.0);
    return p;
}

void init_glorot(Parameter& p, Rng& rng) {
    const double limit = std::sqrt(6.0 / (p.rows + p.cols));
    const std::size_t plane = static_cast<std::size_t>(p.rows) * p.cols;
    const std::size_t planes = p.is_complex ? 2 : 1;
    for (std::size_t pl = 0; pl < planes; ++pl)
        for (std::size_t i = 0; i < plane; ++i)
            p.value[pl * plane + i] = rng.next_uniform(-limit, limit);
}

void init_zero(Parameter& p) { std::fill(p.value.begin(), p.value.end(), 0.0); }

void CNode::ensure_grad() {
    if (grad.rows != value.rows || grad.cols != value.cols)
        grad = ComplexFeatureMatrix(value.rows, value.cols);
}

void RNode::ensure_grad() {
    if (grad.rows != value.rows || grad.cols != value.cols)
        grad = RealMatrix(value.rows, value.cols);
}

CTensor complex_input(const ComplexFeatureMatrix& value) {
    auto node = std::make_shared<CNode>();
    node->value = value;
    return node;
}

CTensor lift_to_complex(const RealMatrix& value) {
    ComplexFeatureMatrix cf(value.rows, value.cols);
    cf.re = value.a;
    return complex_input(cf);
}

RTensor real_input(const RealMatrix& value) {
    auto node = std::make_shared<RNode>();
    node->value = value;
    return node;
}

CTensor fixed_operator_apply(Tape& tape, const ComplexSparseMatrix& op,
                             const CTensor& x) {
    if (op.cols() != x->value.rows)
        throw std::invalid_argument("fixed_operator_apply: dimension mismatch");
    auto out = std::make_shared<CNode>();
    out->value = ComplexFeatureMatrix(op.rows(), x->value.cols);
    op.apply(x->value.re.data(), x->value.im.data(), out->value.re.data(),
             out->value.im.data(), x->value.cols);
    tape.push([&op, x, out]() {
        out->ensure_grad();
        x->ensure_grad();
        op.apply_adjoint(out->grad.re.data(), out->grad.im.data(),
                         x->grad.re.data(), x->grad.im.data(),
                         out->grad.cols, /*accumulate=*/true);
    });
    return out;
}

CTensor cheb_conv(Tape& tape, const ComplexSparseMatrix& op,
                  const std::vector<Parameter*>& thetas, Parameter* bias,
                  const CTensor& x, bool shared_theta) {
    const int n = x->value.rows;
    const int f_in = x->value.cols;
    if (thetas.empty())
        throw std::invalid_argument("cheb_conv: need >= 1 coefficient matrix");
    if (op.rows() != n || op.cols() != n)
        throw std::invalid_argument("cheb_conv: operator/feature size mismatch");
    int f_out;
    for (const Parameter* th : thetas) {
        if (th->is_complex)
            throw std::invalid_argument("Chebyshev coefficients must be real");
        if (shared_theta) {
            if (th->rows != 1 || th->cols != 1)
                throw std::invalid_argument(
                    "shared Chebyshev coefficients must be scalars");
        } else if (th->rows != f_in) {
            throw std::invalid_argument(
                "coefficient rows must match input channels");
        }
        if (!shared_theta && th->cols != thetas[0]->cols)
            throw std::invalid_argument("coefficient shapes must agree");
    }
    f_out = shared_theta ? f_in : thetas[0]->cols;
    if (bias) {
        if (!bias->is_complex || bias->rows != 1 || bias->cols != f_out)
            throw std::invalid_argument("bias must be a complex 1 x F_out row");
    }

    const int order = static_cast<int>(thetas.size());  // K + 1 terms
    // Chebyshev images of the input, reused across output channels.
    auto powers = std::make_shared<std::vector<ComplexFeatureMatrix>>();
    powers->reserve(order);
    powers->push_back(x->value);  // T_0 x
    if (order >= 2) {
        ComplexFeatureMatrix t1(n, f_in);
        op.apply(x->value.re.data(), x->value.im.data(), t1.re.data(),
                 t1.im.data(), f_in);
        powers->push_back(std::move(t1));
    }
    for (int k = 2; k < order; ++k) {
        ComplexFeatureMatrix tk(n, f_in);
        const auto& prev = (*powers)[k - 1];
        const auto& prev2 = (*powers)[k - 2];
        op.apply(prev.re.data(), prev.im.data(), tk.re.data(), tk.im.data(),
                 f_in);
        for (std::size_t i = 0; i < tk.re.size(); ++i) {
            tk.re[i] = 2.0 * tk.re[i] - prev2.re[i];
            tk.im[i] = 2.0 * tk.im[i] - prev2.im[i];
        }
        powers->push_back(std::move(tk));
    }

    auto out = std::make_shared<CNode>();
    out->value = ComplexFeatureMatrix(n, f_out);
    for (int k = 0; k < order; ++k) {
        const auto& sk = (*powers)[k];
        if (shared_theta) {
            const double c = thetas[k]->value[0];
            for (std::size_t i = 0; i < sk.re.size(); ++i) {
                out->value.re[i] += c * sk.re[i];
                out->value.im[i] += c * sk.im[i];
            }
        } else {
            gemm_acc(sk.re.data(), thetas[k]->value.data(),
                     out->value.re.data(), n, f_in, f_out);
            gemm_acc(sk.im.data(), thetas[k]->value.data(),
                     out->value.im.data(), n, f_in, f_out);
        }
    }
    if (bias) {
        const double* bre = bias->value.data();
        const double* bim = bias->value.data() + f_out;
        for (int r = 0; r < n; ++r)
            for (int j = 0; j < f_out; ++j) {
                out->value.re[out->value.index(r, j)] += bre[j];
                out->value.im[out->value.index(r, j)] += bim[j];
            }
    }

    tape.push([&op, thetas, bias, x, out, powers, shared_theta, n, f_in,
               f_out, order]() {
        out->ensure_grad();
        x->ensure_grad();
        const auto& g = out->grad;
        if (bias) {
            double* bgr = bias->grad.data();
            double* bgi = bias->grad.data() + f_out;
            for (int r = 0; r < n; ++r)
                for (int j = 0; j < f_out; ++j) {
                    bgr[j] += g.re[g.index(r, j)];
                    bgi[j] += g.im[g.index(r, j)];
                }
        }
        // Adjoints with respect to each Chebyshev image.
        std::vector<ComplexFeatureMatrix> adj(order);
        for (int k = 0; k < order; ++k) {
            adj[k] = ComplexFeatureMatrix(n, f_in);
            const auto& sk = (*powers)[k];
            if (shared_theta) {
                const double c = thetas[k]->value[0];
                double acc = 0.0;
                for (std::size_t i = 0; i < sk.re.size(); ++i)
                    acc += sk.re[i] * g.re[i] + sk.im[i] * g.im[i];
                thetas[k]->grad[0] += acc;
                for (std::size_t i = 0; i < adj[k].re.size(); ++i) {
                    adj[k].re[i] = c * g.re[i];
                    adj[k].im[i] = c * g.im[i];
                }
            } else {
                gemm_at_acc(sk.re.data(), g.re.data(), thetas[k]->grad.data(),
                            n, f_in, f_out);
                gemm_at_acc(sk.im.data(), g.im.data(), thetas[k]->grad.data(),
                            n, f_in, f_out);
                gemm_bt_acc(g.re.data(), thetas[k]->value.data(),
                            adj[k].re.data(), n, f_in, f_out);
                gemm_bt_acc(g.im.data(), thetas[k]->value.data(),
                            adj[k].im.data(), n, f_in, f_out);
            }
        }
        // Reverse the three-term recurrence.
        ComplexFeatureMatrix tmp(n, f_in);
        for (int k = order - 1; k >= 2; --k) {
            op.apply_adjoint(adj[k].re.data(), adj[k].im.data(), tmp.re.data(),
                             tmp.im.data(), f_in);
            for (std::size_t i = 0; i < tmp.re.size(); ++i) {
                adj[k - 1].re[i] += 2.0 * tmp.re[i];
                adj[k - 1].im[i] += 2.0 * tmp.im[i];
                adj[k - 2].re[i] -= adj[k].re[i];
                adj[k - 2].im[i] -= adj[k].im[i];
            }
        }
        if (order >= 2) {
            op.apply_adjoint(adj[1].re.data(), adj[1].im.data(), tmp.re.data(),
                             tmp.im.data(), f_in);
            for (std::size_t i = 0; i < tmp.re.size(); ++i) {
                adj[0].re[i] += tmp.re[i];
                adj[0].im[i] += tmp.im[i];
            }
        }
        for (std::size_t i = 0; i < adj[0].re.size(); ++i) {
            x->grad.re[i] += adj[0].re[i];
            x->grad.im[i] += adj[0].im[i];
        }
    });
    return out;
}

CTensor complex_relu(Tape& tape, const CTensor& x) {
    auto out = std::make_shared<CNode>();
    out->value = ComplexFeatureMatrix(x->value.rows, x->value.cols);
    auto mask = std::make_shared<std::vector<char>>(x->value.re.size(), 0);
    for (std::size_t i = 0; i < x->value.re.size(); ++i) {
        const double re = x->value.re[i], im = x->value.im[i];
        const bool pass = re > 0.0 || (re == 0.0 && im < 0.0);
        (*mask)[i] = pass ? 1 : 0;
        if (pass) {
            out->value.re[i] = re;
            out->value.im[i] = im;
        }
    }
    if (tape.record_relu_masks)
        tape.relu_masks.insert(tape.relu_masks.end(), mask->begin(),
                               mask->end());
    tape.push([x, out, mask]() {
        out->ensure_grad();
        x->ensure_grad();
        for (std::size_t i = 0; i < mask->size(); ++i) {
            if ((*mask)[i]) {
                x->grad.re[i] += out->grad.re[i];
                x->grad.im[i] += out->grad.im[i];
            }
        }
    });
    return out;
}

CTensor cheb_layer_forward(Tape& tape, const ComplexSparseMatrix& op,
                           const std::vector<Parameter*>& thetas,
                           Parameter* bias, const CTensor& x, bool activation,
                           bool shared_theta) {
    CTensor pre = cheb_conv(tape, op, thetas, bias, x, shared_theta);
    return activation ? complex_relu(tape, pre) : pre;
}

RTensor unwind(Tape& tape, const CTensor& x) {
    const int n = x->value.rows, f = x->value.cols;
    auto out = std::make_shared<RNode>();
    out->value = RealMatrix(n, 2 * f);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < f; ++c) {
            out->value.at(r, c) = x->value.re[x->value.index(r, c)];
            out->value.at(r, f + c) = x->value.im[x->value.index(r, c)];
        }
    tape.push([x, out, n, f]() {
        out->ensure_grad();
        x->ensure_grad();
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < f; ++c) {
                x->grad.re[x->grad.index(r, c)] += out->grad.at(r, c);
                x->grad.im[x->grad.index(r, c)] += out->grad.at(r, f + c);
            }
    });
    return out;
}

RTensor dropout(Tape& tape, const RTensor& x, double p, Rng& mask_rng,
                bool training) {
    if (p < 0.0 || p >= 1.0)
        throw std::invalid_argument("dropout probability must be in [0, 1)");
    if (!training || p == 0.0) return x;
    const double scale = 1.0 / (1.0 - p);
    auto keep = std::make_shared<std::vector<char>>(x->value.a.size(), 0);
    auto out = std::make_shared<RNode>();
    out->value = RealMatrix(x->value.rows, x->value.cols);
    for (std::size_t i = 0; i < x->value.a.size(); ++i) {
        if (mask_rng.next_unit() >= p) {
            (*keep)[i] = 1;
            out->value.a[i] = x->value.a[i] * scale;
        }
    }
    tape.push([x, out, keep, scale]() {
        out->ensure_grad();
        x->ensure_grad();
        for (std::size_t i = 0; i < keep->size(); ++i)
            if ((*keep)[i]) x->grad.a[i] += out->grad.a[i] * scale;
    });
    return out;
}

RTensor linear(Tape& tape, const RTensor& x, Parameter* weight,
               Parameter* bias) {
    const int n = x->value.rows, f_in = x->value.cols;
    if (weight->is_complex || weight->rows != f_in)
        throw std::invalid_argument("linear: weight shape mismatch");
    const int f_out = weight->cols;
    if (bias && (bias->is_complex || bias->rows != 1 || bias->cols != f_out))
        throw std::invalid_argument("linear: bias shape mismatch");
    auto out = std::make_shared<RNode>();
    out->value = RealMatrix(n, f_out);
    gemm_acc(x->value.a.data(), weight->value.data(), out->value.a.data(), n,
             f_in, f_out);
    if (bias)
        for (int r = 0; r < n; ++r)
            for (int j = 0; j < f_out; ++j)
                out->value.at(r, j) += bias->value[j];
    tape.push([x, out, weight, bias, n, f_in, f_out]() {
        out->ensure_grad();
        x->ensure_grad();
        gemm_at_acc(x->value.a.data(), out->grad.a.data(), weight->grad.data(),
                    n, f_in, f_out);
        gemm_bt_acc(out->grad.a.data(), weight->value.data(), x->grad.a.data(),
                    n, f_in, f_out);
        if (bias)
            for (int r = 0; r < n; ++r)
                for (int j = 0; j < f_out; ++j)
                    bias->grad[j] += out->grad.at(r, j);
    });
    return out;
}

RTensor pair_concat(Tape& tape, const RTensor& h,
                    const std::vector<std::pair<int, int>>& pairs) {
    const int f = h->value.cols;
    auto out = std::make_shared<RNode>();
    out->value = RealMatrix(static_cast<int>(pairs.size()), 2 * f);
    for (std::size_t t = 0; t < pairs.size(); ++t) {
        const auto& [u, v] = pairs[t];
        if (u < 0 || u >= h->value.rows || v < 0 || v >= h->value.rows)
            throw std::invalid_argument("pair_concat: vertex out of range");
        for (int c = 0; c < f; ++c) {
            out->value.at(static_cast<int>(t), c) = h->value.at(u, c);
            out->value.at(static_cast<int>(t), f + c) = h->value.at(v, c);
        }
    }
    auto pairs_copy = std::make_shared<std::vector<std::pair<int, int>>>(pairs);
    tape.push([h, out, pairs_copy, f]() {
        out->ensure_grad();
        h->ensure_grad();
        for (std::size_t t = 0; t < pairs_copy->size(); ++t) {
            const auto& [u, v] = (*pairs_copy)[t];
            for (int c = 0; c < f; ++c) {
                h->grad.at(u, c) += out->grad.at(static_cast<int>(t), c);
                h->grad.at(v, c) += out->grad.at(static_cast<int>(t), f + c);
            }
        }
    });
    return out;
}

RealMatrix softmax_rows(const RealMatrix& logits) {
    RealMatrix probs(logits.rows, logits.cols);
    for (int r = 0; r < logits.rows; ++r) {
        double mx = logits.at(r, 0);
        for (int c = 1; c < logits.cols; ++c) mx = std::max(mx, logits.at(r, c));
        double sum = 0.0;
        for (int c = 0; c < logits.cols; ++c) {
            probs.at(r, c) = std::exp(logits.at(r, c) - mx);
            sum += probs.at(r, c);
        }
        for (int c = 0; c < logits.cols; ++c) probs.at(r, c) /= sum;
    }
    return probs;
}

LossResult softmax_cross_entropy(Tape& tape, const RTensor& logits,
                                 const std::vector<int>& labels,
                                 const std::vector<int>& rows) {
    if (rows.empty())
        throw std::invalid_argument("cross-entropy over an empty row set");
    const int num_classes = logits->value.cols;
    LossResult res;
    res.probs = softmax_rows(logits->value);
    double loss = 0.0;
    for (int r : rows) {
        if (r < 0 || r >= logits->value.rows)
            throw std::invalid_argument("loss row index out of range");
        const int y = labels[r];
        if (y < 0 || y >= num_classes)
            throw std::invalid_argument("label out of range at row " +
                                        std::to_string(r));
        loss -= std::log(std::max(res.probs.at(r, y), 1e-300));
    }
    res.loss = loss / static_cast<double>(rows.size());

    auto probs_copy = std::make_shared<RealMatrix>(res.probs);
    auto rows_copy = std::make_shared<std::vector<int>>(rows);
    auto labels_copy = std::make_shared<std::vector<int>>(labels);
    tape.push([logits, probs_copy, rows_copy, labels_copy, num_classes]() {
        logits->ensure_grad();
        const double inv = 1.0 / static_cast<double>(rows_copy->size());
        for (int r : *rows_copy) {
            for (int c = 0; c < num_classes; ++c)
                logits->grad.at(r, c) += probs_copy->at(r, c) * inv;
            logits->grad.at(r, (*labels_copy)[r]) -= inv;
        }
    });
    return res;
}

Adam::Adam(AdamConfig cfg, std::vector<Parameter*> params)
    : cfg_(cfg), params_(std::move(params)) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const Parameter* p : params_) {
        m_.emplace_back(p->size(), 0.0);
        v_.emplace_back(p->size(), 0.0);
    }
}

void Adam::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t pi = 0; pi < params_.size(); ++pi) {
        Parameter& p = *params_[pi];
        if (!p.trainable) continue;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double g = p.grad[i] + cfg_.weight_decay * p.value[i];
            m_[pi][i] = cfg_.beta1 * m_[pi][i] + (1.0 - cfg_.beta1) * g;
            v_[pi][i] = cfg_.beta2 * v_[pi][i] + (1.0 - cfg_.beta2) * g * g;
            const double mhat = m_[pi][i] / bc1;
            const double vhat = v_[pi][i] / bc2;
            p.value[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.epsilon);
        }
    }
}

FdCheckResult finite_difference_check(const std::function<FdEval()>& eval,
                                      const std::vector<Parameter*>& params,
                                      double step, std::size_t max_coords,
                                      std::uint64_t subsample_seed) {
    std::vector<std::pair<std::size_t, std::size_t>> coords;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        if (!params[pi]->trainable) continue;
        for (std::size_t i = 0; i < params[pi]->size(); ++i)
            coords.push_back({pi, i});
    }
    if (coords.size() > max_coords) {
        Rng rng(mix64(subsample_seed ^ 0x66646368u));
        rng.shuffle(coords);
        coords.resize(max_coords);
    }

    // Analytic gradients must be in place before values are perturbed.
    std::vector<std::vector<double>> analytic;
    analytic.reserve(params.size());
    for (const Parameter* p : params) analytic.push_back(p->grad);

    FdCheckResult res;
    for (const auto& [pi, i] : coords) {
        Parameter& p = *params[pi];
        const double orig = p.value[i];
        p.value[i] = orig + step;
        const FdEval plus = eval();
        p.value[i] = orig - step;
        const FdEval minus = eval();
        p.value[i] = orig;
        if (plus.relu_masks != minus.relu_masks) {
            ++res.coords_excluded;
            continue;
        }
        const double fd = (plus.loss - minus.loss) / (2.0 * step);
        const double an = analytic[pi][i];
        const double rel =
            std::abs(fd - an) / std::max({1.0, std::abs(fd), std::abs(an)});
        res.max_rel_error = std::max(res.max_rel_error, rel);
        ++res.coords_checked;
    }
    return res;
}

void save_checkpoint(const std::string& path,
                     const std::vector<Parameter>& params) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << "magnet-checkpoint 1\n" << params.size() << "\n";
    char buf[64];
    for (const Parameter& p : params) {
        out << p.name << " " << p.rows << " " << p.cols << " "
            << (p.is_complex ? "complex" : "real") << " "
            << (p.trainable ? 1 : 0) << "\n";
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", p.value[i]);
            out << buf << (i + 1 == p.value.size() ? "" : " ");
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

void load_checkpoint(const std::string& path, std::vector<Parameter>& params) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read checkpoint: " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "magnet-checkpoint" || version != 1)
        throw std::runtime_error("unrecognized checkpoint header in " + path);
    std::size_t count = 0;
    in >> count;
    if (count != params.size())
        throw std::runtime_error("checkpoint holds " + std::to_string(count) +
                                 " parameters, model expects " +
                                 std::to_string(params.size()));
    for (std::size_t k = 0; k < count; ++k) {
        std::string name, kind;
        int rows, cols, trainable;
        if (!(in >> name >> rows >> cols >> kind >> trainable))
            throw std::runtime_error("truncated checkpoint: " + path);
        auto it = std::find_if(params.begin(), params.end(),
                               [&](const Parameter& p) { return p.name == name; });
        if (it == params.end())
            throw std::runtime_error("checkpoint parameter '" + name +
                                     "' unknown to the model");
        const bool is_complex = kind == "complex";
        if (it->rows != rows || it->cols != cols || it->is_complex != is_complex)
            throw std::runtime_error("checkpoint shape mismatch for '" + name +
                                     "'");
        for (double& v : it->value)
            if (!(in >> v))
                throw std::runtime_error("truncated checkpoint values: " + path);
    }
}

}  // namespace magnet
