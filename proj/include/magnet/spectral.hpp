#pragma once

// Magnetic Laplacians and the spectral toolbox built on them: dense
// eigendecomposition with a deterministic ordering, graph Fourier transforms,
// spectral convolution matrices, Chebyshev filtering, the renormalized
// propagation operator used inside the network, and closed-form spectra for
// directed stars and cycles that serve as independent oracles.

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "magnet/graph.hpp"
#include "magnet/sparse.hpp"

namespace magnet {

enum class Normalization { unnormalized, normalized };

// What to do when the normalized Laplacian meets a zero-degree vertex.
// `error` refuses (the formula divides by the degree); `identity_row` keeps
// the identity contribution so the row becomes e_u, the standard convention
// that keeps the spectrum in [0, 2].
enum class IsolatedPolicy { error, identity_row };

struct MagneticLaplacian {
    double q = 0.0;
    Normalization normalization = Normalization::unnormalized;
    int num_vertices = 0;
    ComplexSparseMatrix matrix;
};

MagneticLaplacian build_laplacian(const DirectedGraph& g, double q,
                                  Normalization normalization,
                                  bool allow_extended_q = false,
                                  IsolatedPolicy isolated = IsolatedPolicy::error);

// Classical symmetric normalized Laplacian of the symmetrized (weighted)
// graph, computed along a purely real code path. At q = 0 the magnetic
// normalized Laplacian must coincide with this matrix.
ComplexSparseMatrix classical_normalized_laplacian(
    const DirectedGraph& g, IsolatedPolicy isolated = IsolatedPolicy::error);

// Degree-renormalized propagation operator: self-loops added to the
// symmetrized adjacency, then degree-normalized and phase-modulated. Always
// well defined (renormalized degrees are >= 1).
ComplexSparseMatrix renormalized_propagation(const DirectedGraph& g, double q,
                                             bool allow_extended_q = false);

struct EigenDecomposition {
    std::vector<double> eigenvalues;  // ascending
    Eigen::MatrixXcd eigenvectors;    // unit columns, phase-canonicalized
};

// Dense Hermitian eigendecomposition. Eigenvalues ascend; each eigenvector's
// first component of magnitude > 1e-12 (relative) is rotated onto the
// positive real axis, and ties between equal eigenvalues are ordered by
// lexicographic comparison of the canonicalized vectors. Intended for
// analysis and oracle checks; refuses matrices larger than dense_cap.
EigenDecomposition eigendecompose(const ComplexSparseMatrix& m,
                                  int dense_cap = 4096);

Eigen::MatrixXcd to_dense(const ComplexSparseMatrix& m);

// Graph Fourier transform and inverse with respect to an eigenbasis U:
// forward is U^H x, inverse is U xhat.
Eigen::VectorXcd fourier_transform(const Eigen::MatrixXcd& basis,
                                   const Eigen::VectorXcd& x);
Eigen::VectorXcd inverse_fourier(const Eigen::MatrixXcd& basis,
                                 const Eigen::VectorXcd& xhat);

// Convolution matrix U diag(sigma) U^H for a spectral multiplier sigma.
Eigen::MatrixXcd spectral_conv_matrix(const EigenDecomposition& eig,
                                      const std::vector<double>& sigma);

// x^H L x. For Hermitian L the value is real up to roundoff.
cdouble quadratic_form(const ComplexSparseMatrix& m,
                       const std::vector<cdouble>& x);

// Largest eigenvalue of a Hermitian PSD matrix by power iteration with a
// Rayleigh-quotient stopping rule. The zero matrix yields 0.
double lambda_max_estimate(const ComplexSparseMatrix& m, double tol = 1e-10,
                           int max_iters = 10000);

// (2 / lambda_max) L - I, the operator fed to Chebyshev polynomials.
ComplexSparseMatrix scaled_laplacian(const ComplexSparseMatrix& laplacian,
                                     double lambda_max);

// y = sum_k coeffs[k] T_k(L_scaled) x via the three-term recurrence
// T_0 = x, T_1 = L x, T_k = 2 L T_{k-1} - T_{k-2}.
std::vector<cdouble> cheb_filter_apply(const ComplexSparseMatrix& l_scaled,
                                       const std::vector<double>& coeffs,
                                       const std::vector<cdouble>& x);

// Scalar Chebyshev value T_k(x) by the same recurrence.
double cheb_scalar(int k, double x);

// Closed-form spectra for directed stars and cycles.
//
// Directions follow the adjacency phase convention Theta(u,v) =
// 2 pi q (A(u,v) - A(v,u)): `in` is the variant whose lead eigenvector
// carries e^{+2 pi i q} at the center (realized by edges center -> leaf),
// `out` the complex conjugate (edges leaf -> center).
enum class StarDirection { in, out };

struct StarSpectrum {
    std::vector<double> eigenvalues;     // ascending: 0, 1/2 (n-2 times), n/2
    std::vector<cdouble> lead;           // unit eigenvector for eigenvalue 0
    std::vector<cdouble> last;           // unit eigenvector for eigenvalue n/2
};

StarSpectrum star_spectrum_oracle(int n, double q, StarDirection direction);

// Which star graph realizes the closed forms of a given direction label.
DirectedGraph star_graph_for(int n, StarDirection direction);

struct CycleSpectrum {
    std::vector<double> eigenvalues;  // indexed by k = 1..n (unsorted)
    Eigen::MatrixXcd dft_columns;     // column k-1 = unit DFT vector u_k
};

// Directed n-cycle (edges n -> n+1): eigenvalue 1 - cos(2 pi (k/n + q)) with
// q-independent DFT eigenvectors u_k(m) = exp(2 pi i k m / n) / sqrt(n).
CycleSpectrum cycle_spectrum_oracle(int n, double q);

// || u - e^{i phi} v || minimized over the phase phi (unit vectors assumed).
double phase_aligned_distance(const Eigen::VectorXcd& u,
                              const Eigen::VectorXcd& v);

// Spectral projector onto the span of eigenvector columns [first, last).
Eigen::MatrixXcd spectral_projector(const Eigen::MatrixXcd& basis, int first,
                                    int last);

}  // namespace magnet
