#pragma once

// Complex sparse matrices in compressed sparse row form with canonically
// sorted entries. This is the lingua franca between graph construction, the
// spectral operators and the network layers. Values are std::complex<double>;
// builders drop entries with magnitude <= 1e-15 so that equality of the
// canonical form is meaningful.

#include <complex>
#include <vector>

namespace magnet {

using cdouble = std::complex<double>;

class SparseBuilder;

class ComplexSparseMatrix {
public:
    ComplexSparseMatrix() = default;

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int nnz() const { return static_cast<int>(values_.size()); }
    bool hermitian_hint() const { return hermitian_; }

    // Entry access; zero when absent (binary search within the row).
    cdouble at(int r, int c) const;

    // y = this * x for planar complex dense matrices (row-major, num_cols
    // feature columns). y must be zeroed or preloaded by the caller with
    // accumulate=true, otherwise it is overwritten.
    void apply(const double* x_re, const double* x_im, double* y_re,
               double* y_im, int num_cols, bool accumulate = false) const;

    // y = conj(transpose(this)) * x.
    void apply_adjoint(const double* x_re, const double* x_im, double* y_re,
                       double* y_im, int num_cols, bool accumulate = false) const;

    std::vector<cdouble> apply_vector(const std::vector<cdouble>& x) const;

    bool is_hermitian(double tol = 1e-12) const;

    ComplexSparseMatrix scaled(cdouble factor) const;
    ComplexSparseMatrix plus_diagonal(cdouble shift) const;  // this + shift*I

    bool operator==(const ComplexSparseMatrix& other) const;

    // Row iteration for analysis code.
    struct Entry { int row, col; cdouble value; };
    template <typename F>
    void for_each(F&& f) const {
        for (int r = 0; r < rows_; ++r)
            for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                f(Entry{r, col_idx_[k], values_[k]});
    }

private:
    friend class SparseBuilder;

    int rows_ = 0, cols_ = 0;
    bool hermitian_ = false;
    std::vector<int> row_ptr_;   // size rows_ + 1
    std::vector<int> col_idx_;   // sorted within each row
    std::vector<cdouble> values_;
};

// Accumulating builder: repeated add() on the same coordinate sums values.
class SparseBuilder {
public:
    SparseBuilder(int rows, int cols);

    void add(int r, int c, cdouble v);

    // Finalizes into canonical CSR, dropping entries with |v| <= drop_tol.
    // hermitian_hint is advisory and verified lazily by is_hermitian().
    ComplexSparseMatrix build(bool hermitian_hint = false,
                              double drop_tol = 1e-15);

private:
    int rows_, cols_;
    std::vector<std::pair<std::pair<int, int>, cdouble>> entries_;
};

}  // namespace magnet
