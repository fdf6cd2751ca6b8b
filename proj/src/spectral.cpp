#include "magnet/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "magnet/rng.hpp"

namespace magnet {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::vector<double> inverse_sqrt_degrees(const std::vector<double>& deg,
                                         IsolatedPolicy isolated) {
    std::vector<double> dinv(deg.size(), 0.0);
    for (std::size_t u = 0; u < deg.size(); ++u) {
        if (deg[u] > 0.0) {
            dinv[u] = 1.0 / std::sqrt(deg[u]);
        } else if (isolated == IsolatedPolicy::error) {
            throw std::invalid_argument(
                "normalized Laplacian undefined for isolated vertex " +
                std::to_string(u) +
                "; use the renormalized propagation operator or the "
                "identity-row policy");
        }
    }
    return dinv;
}

}  // namespace

MagneticLaplacian build_laplacian(const DirectedGraph& g, double q,
                                  Normalization normalization,
                                  bool allow_extended_q,
                                  IsolatedPolicy isolated) {
    validate_q(q, allow_extended_q);
    const ComplexSparseMatrix h = hermitian_adjacency(g, q, allow_extended_q);
    const std::vector<double> deg = symmetrized_degrees(g);
    SparseBuilder b(g.num_vertices, g.num_vertices);
    if (normalization == Normalization::unnormalized) {
        for (int u = 0; u < g.num_vertices; ++u)
            if (deg[u] != 0.0) b.add(u, u, {deg[u], 0.0});
        h.for_each([&](const ComplexSparseMatrix::Entry& e) {
            b.add(e.row, e.col, -e.value);
        });
    } else {
        const std::vector<double> dinv = inverse_sqrt_degrees(deg, isolated);
        for (int u = 0; u < g.num_vertices; ++u) b.add(u, u, {1.0, 0.0});
        h.for_each([&](const ComplexSparseMatrix::Entry& e) {
            b.add(e.row, e.col, -e.value * dinv[e.row] * dinv[e.col]);
        });
    }
    MagneticLaplacian out;
    out.q = q;
    out.normalization = normalization;
    out.num_vertices = g.num_vertices;
    out.matrix = b.build(/*hermitian_hint=*/true);
    return out;
}

ComplexSparseMatrix classical_normalized_laplacian(const DirectedGraph& g,
                                                   IsolatedPolicy isolated) {
    const std::vector<double> deg = symmetrized_degrees(g);
    const std::vector<double> dinv = inverse_sqrt_degrees(deg, isolated);
    SparseBuilder b(g.num_vertices, g.num_vertices);
    for (int u = 0; u < g.num_vertices; ++u) b.add(u, u, {1.0, 0.0});
    symmetrized_adjacency(g).for_each([&](const ComplexSparseMatrix::Entry& e) {
        b.add(e.row, e.col,
              {-e.value.real() * dinv[e.row] * dinv[e.col], 0.0});
    });
    return b.build(/*hermitian_hint=*/true);
}

ComplexSparseMatrix renormalized_propagation(const DirectedGraph& g, double q,
                                             bool allow_extended_q) {
    validate_q(q, allow_extended_q);
    std::vector<double> deg = symmetrized_degrees(g);
    for (auto& d : deg) d += 1.0;  // self-loop weight
    std::vector<double> dinv(deg.size());
    for (std::size_t u = 0; u < deg.size(); ++u) dinv[u] = 1.0 / std::sqrt(deg[u]);

    SparseBuilder b(g.num_vertices, g.num_vertices);
    for (int u = 0; u < g.num_vertices; ++u)
        b.add(u, u, {dinv[u] * dinv[u], 0.0});
    hermitian_adjacency(g, q, allow_extended_q)
        .for_each([&](const ComplexSparseMatrix::Entry& e) {
            b.add(e.row, e.col, e.value * dinv[e.row] * dinv[e.col]);
        });
    return b.build(/*hermitian_hint=*/true);
}

Eigen::MatrixXcd to_dense(const ComplexSparseMatrix& m) {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(m.rows(), m.cols());
    m.for_each([&](const ComplexSparseMatrix::Entry& e) {
        d(e.row, e.col) = e.value;
    });
    return d;
}

namespace {

void canonicalize_column(Eigen::MatrixXcd& u, int col) {
    const int n = static_cast<int>(u.rows());
    double max_mag = 0.0;
    for (int i = 0; i < n; ++i) max_mag = std::max(max_mag, std::abs(u(i, col)));
    if (max_mag == 0.0) return;
    for (int i = 0; i < n; ++i) {
        const double mag = std::abs(u(i, col));
        if (mag > 1e-12 * max_mag) {
            const cdouble rot = std::conj(u(i, col)) / mag;
            u.col(col) *= rot;
            return;
        }
    }
}

bool column_lex_less(const Eigen::MatrixXcd& u, int a, int b) {
    for (int i = 0; i < u.rows(); ++i) {
        const cdouble x = u(i, a), y = u(i, b);
        if (x.real() != y.real()) return x.real() < y.real();
        if (x.imag() != y.imag()) return x.imag() < y.imag();
    }
    return false;
}

}  // namespace

EigenDecomposition eigendecompose(const ComplexSparseMatrix& m, int dense_cap) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("eigendecompose: matrix not square");
    if (m.rows() > dense_cap)
        throw std::invalid_argument(
            "matrix exceeds the dense eigensolver cap (" +
            std::to_string(dense_cap) +
            "); use lambda_max_estimate for extremal eigenvalues");
    if (!m.is_hermitian(1e-10))
        throw std::invalid_argument("eigendecompose: matrix is not Hermitian");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_dense(m));
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("dense Hermitian eigensolver failed");

    EigenDecomposition out;
    const int n = m.rows();
    out.eigenvalues.resize(n);
    for (int i = 0; i < n; ++i) out.eigenvalues[i] = solver.eigenvalues()(i);
    out.eigenvectors = solver.eigenvectors();
    for (int c = 0; c < n; ++c) canonicalize_column(out.eigenvectors, c);

    // Deterministic order inside numerically degenerate groups.
    const double scale = std::max(
        1.0, std::max(std::abs(out.eigenvalues.front()),
                      std::abs(out.eigenvalues.back())));
    int start = 0;
    while (start < n) {
        int end = start + 1;
        while (end < n &&
               out.eigenvalues[end] - out.eigenvalues[start] <= 1e-12 * scale)
            ++end;
        if (end - start > 1) {
            std::vector<int> idx(end - start);
            std::iota(idx.begin(), idx.end(), start);
            std::sort(idx.begin(), idx.end(), [&](int a, int b) {
                return column_lex_less(out.eigenvectors, a, b);
            });
            Eigen::MatrixXcd block(n, end - start);
            for (int j = 0; j < end - start; ++j)
                block.col(j) = out.eigenvectors.col(idx[j]);
            out.eigenvectors.block(0, start, n, end - start) = block;
        }
        start = end;
    }
    return out;
}

Eigen::VectorXcd fourier_transform(const Eigen::MatrixXcd& basis,
                                   const Eigen::VectorXcd& x) {
    return basis.adjoint() * x;
}

Eigen::VectorXcd inverse_fourier(const Eigen::MatrixXcd& basis,
                                 const Eigen::VectorXcd& xhat) {
    return basis * xhat;
}

Eigen::MatrixXcd spectral_conv_matrix(const EigenDecomposition& eig,
                                      const std::vector<double>& sigma) {
    const int n = static_cast<int>(eig.eigenvalues.size());
    if (static_cast<int>(sigma.size()) != n)
        throw std::invalid_argument(
            "spectral multiplier length must equal matrix dimension");
    Eigen::VectorXcd d(n);
    for (int i = 0; i < n; ++i) d(i) = sigma[i];
    return eig.eigenvectors * d.asDiagonal() * eig.eigenvectors.adjoint();
}

cdouble quadratic_form(const ComplexSparseMatrix& m,
                       const std::vector<cdouble>& x) {
    const std::vector<cdouble> mx = m.apply_vector(x);
    cdouble acc{0.0, 0.0};
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * mx[i];
    return acc;
}

double lambda_max_estimate(const ComplexSparseMatrix& m, double tol,
                           int max_iters) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("lambda_max_estimate: matrix not square");
    const int n = m.rows();
    if (n == 0) return 0.0;

    Rng rng(0x6d61676e65746cULL);
    std::vector<cdouble> v(n);
    for (auto& z : v) z = {rng.next_normal(), rng.next_normal()};
    auto norm = [](const std::vector<cdouble>& w) {
        double s = 0.0;
        for (const auto& z : w) s += std::norm(z);
        return std::sqrt(s);
    };
    double nv = norm(v);
    for (auto& z : v) z /= nv;

    double lambda = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        std::vector<cdouble> w = m.apply_vector(v);
        const double nw = norm(w);
        if (nw == 0.0) return 0.0;  // v in the kernel of a zero-ish operator
        cdouble rq{0.0, 0.0};
        for (int i = 0; i < n; ++i) rq += std::conj(v[i]) * w[i];
        const double next = rq.real();
        for (int i = 0; i < n; ++i) v[i] = w[i] / nw;
        if (it > 0 && std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next))) {
            return next;
        }
        lambda = next;
    }
    throw std::runtime_error(
        "power iteration did not converge; last estimate " +
        std::to_string(lambda));
}

ComplexSparseMatrix scaled_laplacian(const ComplexSparseMatrix& laplacian,
                                     double lambda_max) {
    if (!(lambda_max > 0.0))
        throw std::invalid_argument("lambda_max must be positive");
    return laplacian.scaled({2.0 / lambda_max, 0.0}).plus_diagonal({-1.0, 0.0});
}

std::vector<cdouble> cheb_filter_apply(const ComplexSparseMatrix& l_scaled,
                                       const std::vector<double>& coeffs,
                                       const std::vector<cdouble>& x) {
    if (coeffs.empty())
        throw std::invalid_argument("Chebyshev filter needs >= 1 coefficient");
    std::vector<cdouble> acc(x.size(), cdouble{0.0, 0.0});
    std::vector<cdouble> t_prev = x;  // T_0 x
    for (std::size_t i = 0; i < x.size(); ++i) acc[i] += coeffs[0] * t_prev[i];
    if (coeffs.size() == 1) return acc;

    std::vector<cdouble> t_curr = l_scaled.apply_vector(x);  // T_1 x
    for (std::size_t i = 0; i < x.size(); ++i) acc[i] += coeffs[1] * t_curr[i];
    for (std::size_t k = 2; k < coeffs.size(); ++k) {
        std::vector<cdouble> t_next = l_scaled.apply_vector(t_curr);
        for (std::size_t i = 0; i < x.size(); ++i)
            t_next[i] = 2.0 * t_next[i] - t_prev[i];
        for (std::size_t i = 0; i < x.size(); ++i)
            acc[i] += coeffs[k] * t_next[i];
        t_prev = std::move(t_curr);
        t_curr = std::move(t_next);
    }
    return acc;
}

double cheb_scalar(int k, double x) {
    if (k < 0) throw std::invalid_argument("Chebyshev order must be >= 0");
    double t_prev = 1.0, t_curr = x;
    if (k == 0) return t_prev;
    for (int i = 2; i <= k; ++i) {
        const double t_next = 2.0 * x * t_curr - t_prev;
        t_prev = t_curr;
        t_curr = t_next;
    }
    return t_curr;
}

StarSpectrum star_spectrum_oracle(int n, double q, StarDirection direction) {
    if (n < 2) throw std::invalid_argument("star oracle needs n >= 2");
    validate_q(q, /*allow_extended_q=*/true);
    StarSpectrum s;
    s.eigenvalues.push_back(0.0);
    for (int k = 0; k < n - 2; ++k) s.eigenvalues.push_back(0.5);
    s.eigenvalues.push_back(n / 2.0);

    const double th = kTwoPi * q;
    cdouble center{std::cos(th), std::sin(th)};
    if (direction == StarDirection::out) center = std::conj(center);

    s.lead.assign(n, cdouble{1.0, 0.0});
    s.lead[0] = center;
    const double lead_norm = std::sqrt(static_cast<double>(n));
    for (auto& z : s.lead) z /= lead_norm;

    s.last.assign(n, cdouble{1.0 / (n - 1.0), 0.0});
    s.last[0] = -center;
    const double last_norm = std::sqrt(n / (n - 1.0));
    for (auto& z : s.last) z /= last_norm;
    return s;
}

DirectedGraph star_graph_for(int n, StarDirection direction) {
    // Under Theta(u,v) = 2 pi q (A(u,v) - A(v,u)), the lead eigenvector
    // carries e^{+2 pi i q} at the center exactly when edges leave the center.
    return make_directed_star(n, direction == StarDirection::in);
}

CycleSpectrum cycle_spectrum_oracle(int n, double q) {
    if (n < 3) throw std::invalid_argument("cycle oracle needs n >= 3");
    validate_q(q, /*allow_extended_q=*/true);
    CycleSpectrum c;
    c.eigenvalues.resize(n);
    c.dft_columns.resize(n, n);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    for (int k = 1; k <= n; ++k) {
        c.eigenvalues[k - 1] =
            1.0 - std::cos(kTwoPi * (static_cast<double>(k) / n + q));
        for (int m = 0; m < n; ++m) {
            const double ang = kTwoPi * k * m / n;
            c.dft_columns(m, k - 1) =
                cdouble{std::cos(ang) * inv_sqrt_n, std::sin(ang) * inv_sqrt_n};
        }
    }
    return c;
}

double phase_aligned_distance(const Eigen::VectorXcd& u,
                              const Eigen::VectorXcd& v) {
    cdouble iv{0.0, 0.0};
    for (int i = 0; i < u.size(); ++i) iv += std::conj(v(i)) * u(i);
    cdouble phase{1.0, 0.0};
    if (std::abs(iv) > 0.0) phase = iv / std::abs(iv);
    return (u - phase * v).norm();
}

Eigen::MatrixXcd spectral_projector(const Eigen::MatrixXcd& basis, int first,
                                    int last) {
    if (first < 0 || last > basis.cols() || first >= last)
        throw std::invalid_argument("invalid projector column range");
    const auto block = basis.middleCols(first, last - first);
    return block * block.adjoint();
}

}  // namespace magnet
