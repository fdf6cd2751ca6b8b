#include "magnet/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace magnet {

cdouble ComplexSparseMatrix::at(int r, int c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
        throw std::out_of_range("sparse entry index out of range");
    const auto begin = col_idx_.begin() + row_ptr_[r];
    const auto end = col_idx_.begin() + row_ptr_[r + 1];
    const auto it = std::lower_bound(begin, end, c);
    if (it == end || *it != c) return {0.0, 0.0};
    return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

void ComplexSparseMatrix::apply(const double* x_re, const double* x_im,
                                double* y_re, double* y_im, int num_cols,
                                bool accumulate) const {
    if (!accumulate) {
        std::fill(y_re, y_re + static_cast<std::size_t>(rows_) * num_cols, 0.0);
        std::fill(y_im, y_im + static_cast<std::size_t>(rows_) * num_cols, 0.0);
    }
    for (int r = 0; r < rows_; ++r) {
        double* out_re = y_re + static_cast<std::size_t>(r) * num_cols;
        double* out_im = y_im + static_cast<std::size_t>(r) * num_cols;
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            const double vr = values_[k].real(), vi = values_[k].imag();
            const double* in_re =
                x_re + static_cast<std::size_t>(col_idx_[k]) * num_cols;
            const double* in_im =
                x_im + static_cast<std::size_t>(col_idx_[k]) * num_cols;
            for (int f = 0; f < num_cols; ++f) {
                out_re[f] += vr * in_re[f] - vi * in_im[f];
                out_im[f] += vr * in_im[f] + vi * in_re[f];
            }
        }
    }
}

void ComplexSparseMatrix::apply_adjoint(const double* x_re, const double* x_im,
                                        double* y_re, double* y_im,
                                        int num_cols, bool accumulate) const {
    if (!accumulate) {
        std::fill(y_re, y_re + static_cast<std::size_t>(cols_) * num_cols, 0.0);
        std::fill(y_im, y_im + static_cast<std::size_t>(cols_) * num_cols, 0.0);
    }
    for (int r = 0; r < rows_; ++r) {
        const double* in_re = x_re + static_cast<std::size_t>(r) * num_cols;
        const double* in_im = x_im + static_cast<std::size_t>(r) * num_cols;
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            // conj(v) lands at (col, row)
            const double vr = values_[k].real(), vi = -values_[k].imag();
            double* out_re =
                y_re + static_cast<std::size_t>(col_idx_[k]) * num_cols;
            double* out_im =
                y_im + static_cast<std::size_t>(col_idx_[k]) * num_cols;
            for (int f = 0; f < num_cols; ++f) {
                out_re[f] += vr * in_re[f] - vi * in_im[f];
                out_im[f] += vr * in_im[f] + vi * in_re[f];
            }
        }
    }
}

std::vector<cdouble> ComplexSparseMatrix::apply_vector(
    const std::vector<cdouble>& x) const {
    if (static_cast<int>(x.size()) != cols_)
        throw std::invalid_argument("apply_vector: dimension mismatch");
    std::vector<cdouble> y(rows_, cdouble{0.0, 0.0});
    for (int r = 0; r < rows_; ++r)
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            y[r] += values_[k] * x[col_idx_[k]];
    return y;
}

bool ComplexSparseMatrix::is_hermitian(double tol) const {
    if (rows_ != cols_) return false;
    for (int r = 0; r < rows_; ++r) {
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            const cdouble mirrored = at(col_idx_[k], r);
            if (std::abs(values_[k] - std::conj(mirrored)) > tol) return false;
        }
    }
    return true;
}

ComplexSparseMatrix ComplexSparseMatrix::scaled(cdouble factor) const {
    ComplexSparseMatrix out = *this;
    for (auto& v : out.values_) v *= factor;
    out.hermitian_ = hermitian_ && factor.imag() == 0.0;
    return out;
}

ComplexSparseMatrix ComplexSparseMatrix::plus_diagonal(cdouble shift) const {
    if (rows_ != cols_)
        throw std::invalid_argument("plus_diagonal: matrix not square");
    SparseBuilder b(rows_, cols_);
    for_each([&](const Entry& e) { b.add(e.row, e.col, e.value); });
    for (int i = 0; i < rows_; ++i) b.add(i, i, shift);
    return b.build(hermitian_ && shift.imag() == 0.0);
}

bool ComplexSparseMatrix::operator==(const ComplexSparseMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ &&
           row_ptr_ == other.row_ptr_ && col_idx_ == other.col_idx_ &&
           values_ == other.values_;
}

SparseBuilder::SparseBuilder(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0)
        throw std::invalid_argument("sparse matrix dimensions must be >= 0");
}

void SparseBuilder::add(int r, int c, cdouble v) {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
        throw std::out_of_range("sparse add: index out of range");
    entries_.push_back({{r, c}, v});
}

ComplexSparseMatrix SparseBuilder::build(bool hermitian_hint, double drop_tol) {
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    ComplexSparseMatrix m;
    m.rows_ = rows_;
    m.cols_ = cols_;
    m.hermitian_ = hermitian_hint;
    m.row_ptr_.assign(rows_ + 1, 0);

    std::vector<std::pair<std::pair<int, int>, cdouble>> merged;
    merged.reserve(entries_.size());
    for (const auto& e : entries_) {
        if (!merged.empty() && merged.back().first == e.first)
            merged.back().second += e.second;
        else
            merged.push_back(e);
    }
    for (const auto& e : merged) {
        if (std::abs(e.second) <= drop_tol) continue;
        m.col_idx_.push_back(e.first.second);
        m.values_.push_back(e.second);
        ++m.row_ptr_[e.first.first + 1];
    }
    for (int r = 0; r < rows_; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
    return m;
}

}  // namespace magnet
