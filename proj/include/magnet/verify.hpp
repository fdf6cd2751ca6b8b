#pragma once

// Executable mathematical invariants: positive semidefiniteness and the
// spectral upper bound of the Laplacian family, the closed-form star and
// cycle spectra, equivalence of Chebyshev filtering with the dense spectral
// construction, end-to-end gradient correctness, and the reduction of the
// network at q = 0 to the classical symmetrized operator. Each check is
// parameterized by problem sizes so the command-line suite can run a quick
// variant while the release gate runs the full one.

#include <cstdint>
#include <string>
#include <vector>

namespace magnet {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct LaplacianBoundsResult {
    CheckResult psd;          // min eigenvalue >= -1e-9, both normalizations
    CheckResult upper_bound;  // normalized max eigenvalue <= 2 + 1e-9
};

// Random digraph sweep over all q values and both normalizations.
LaplacianBoundsResult check_laplacian_bounds(int num_graphs, int max_vertices,
                                             const std::vector<double>& qs,
                                             std::uint64_t seed);

// Star eigenvalues {0, 1/2 x (n-2), n/2} and the two non-degenerate
// eigenvectors, both orientations, compared up to a global phase.
CheckResult check_star_forms(int min_n, int max_n,
                             const std::vector<double>& qs, double tol);

// Cycle eigenvalue multiset 1 - cos(2 pi (k/n + q)) and the q-independence
// of the eigenvectors, asserted through spectral projectors against the
// fixed DFT basis.
CheckResult check_cycle_forms(int min_n, int max_n,
                              const std::vector<double>& qs, double value_tol,
                              double projector_tol);

// Chebyshev recurrence filtering against U diag(sigma) U^H on random graphs,
// random coefficients and random complex signals.
CheckResult check_cheb_matches_dense(int num_graphs, int max_vertices,
                                     int max_order, double tol,
                                     std::uint64_t seed);

// Central finite differences against the analytic gradients of the complete
// two-layer network loss (dropout active under a frozen mask); activation
// boundary coordinates are excluded.
CheckResult check_model_gradients(int num_vertices, double rel_tol,
                                  std::size_t max_coords, std::uint64_t seed);

// Forward passes, losses and all parameter gradients of the q = 0 network
// against the same network run on the classical symmetrized normalized
// Laplacian computed along a purely real code path.
CheckResult check_q_zero_reduction(double tol, std::uint64_t seed);

// The full suite at release-gate sizes, or reduced sizes with quick = true.
std::vector<CheckResult> run_verification_suite(bool quick);

}  // namespace magnet
