#pragma once

#include <algorithm>
#include <vector>

#include "adapoly/types.hpp"

namespace adapoly {

template <class Scalar>
struct Triplet {
    index_t row;
    index_t col;
    Scalar value;
};

/// Compressed-sparse-row matrix with owned storage.
///
/// Rows are kept sorted by column with no duplicate entries. When the matrix
/// acts as a symmetric operator both triangles are stored explicitly, so the
/// multiplication kernels never need symmetry-aware logic.
template <class Scalar>
struct CsrMatrix {
    index_t n_rows = 0;
    index_t n_cols = 0;
    std::vector<index_t> row_ptr{0};  // length n_rows + 1, non-decreasing
    std::vector<index_t> col_idx;
    std::vector<Scalar> values;

    index_t nnz() const { return static_cast<index_t>(values.size()); }

    /// Build from an unordered triplet list; duplicate (row, col) pairs are
    /// summed.
    static CsrMatrix from_triplets(index_t rows, index_t cols,
                                   std::vector<Triplet<Scalar>> entries) {
        if (rows < 0 || cols < 0) throw DimensionError("negative matrix size");
        std::sort(entries.begin(), entries.end(),
                  [](const Triplet<Scalar>& a, const Triplet<Scalar>& b) {
                      return a.row != b.row ? a.row < b.row : a.col < b.col;
                  });
        CsrMatrix m;
        m.n_rows = rows;
        m.n_cols = cols;
        m.row_ptr.assign(static_cast<std::size_t>(rows) + 1, 0);
        m.col_idx.reserve(entries.size());
        m.values.reserve(entries.size());
        for (std::size_t i = 0; i < entries.size();) {
            const index_t r = entries[i].row;
            const index_t c = entries[i].col;
            if (r < 0 || r >= rows || c < 0 || c >= cols)
                throw DimensionError("triplet index out of bounds");
            Scalar v = entries[i].value;
            for (++i; i < entries.size() && entries[i].row == r && entries[i].col == c; ++i)
                v += entries[i].value;
            m.col_idx.push_back(c);
            m.values.push_back(v);
            ++m.row_ptr[static_cast<std::size_t>(r) + 1];
        }
        for (index_t r = 0; r < rows; ++r)
            m.row_ptr[static_cast<std::size_t>(r) + 1] += m.row_ptr[static_cast<std::size_t>(r)];
        return m;
    }

    std::vector<Triplet<Scalar>> to_triplets() const {
        std::vector<Triplet<Scalar>> out;
        out.reserve(static_cast<std::size_t>(nnz()));
        for (index_t r = 0; r < n_rows; ++r)
            for (index_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
                out.push_back({r, col_idx[k], values[k]});
        return out;
    }

    Matrix<Scalar> to_dense() const {
        Matrix<Scalar> d = Matrix<Scalar>::Zero(n_rows, n_cols);
        for (index_t r = 0; r < n_rows; ++r)
            for (index_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
                d(r, col_idx[k]) += values[k];
        return d;
    }

    /// Exact structural and value symmetry of the fully expanded matrix.
    bool is_symmetric() const {
        if (n_rows != n_cols) return false;
        // Walk each row's entries and binary-search the mirrored position.
        for (index_t r = 0; r < n_rows; ++r) {
            for (index_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
                const index_t c = col_idx[k];
                if (c == r) continue;
                const auto lo = col_idx.begin() + row_ptr[c];
                const auto hi = col_idx.begin() + row_ptr[c + 1];
                const auto it = std::lower_bound(lo, hi, r);
                if (it == hi || *it != r) return false;
                if (values[static_cast<std::size_t>(it - col_idx.begin())] != values[k])
                    return false;
            }
        }
        return true;
    }

    /// Structural invariants; throws on violation. Used by ingestion and tests.
    void validate() const {
        if (static_cast<index_t>(row_ptr.size()) != n_rows + 1)
            throw DimensionError("row_ptr length mismatch");
        if (row_ptr.front() != 0 || row_ptr.back() != nnz())
            throw DimensionError("row_ptr endpoints mismatch");
        for (index_t r = 0; r < n_rows; ++r) {
            if (row_ptr[r + 1] < row_ptr[r])
                throw DimensionError("row_ptr not non-decreasing");
            for (index_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
                if (col_idx[k] < 0 || col_idx[k] >= n_cols)
                    throw DimensionError("column index out of range");
                if (k > row_ptr[r] && col_idx[k] <= col_idx[k - 1])
                    throw DimensionError("columns not strictly increasing within a row");
            }
        }
    }
};

using CsrMatrixd = CsrMatrix<double>;

/// y = A x with exact per-row left-to-right accumulation (deterministic).
template <class Scalar, class Derived>
Vector<Scalar> csr_spmv(const CsrMatrix<Scalar>& a, const Eigen::MatrixBase<Derived>& x) {
    if (x.rows() != a.n_cols || x.cols() != 1)
        throw DimensionError("csr_spmv: operand is not a vector of length n_cols");
    Vector<Scalar> y = Vector<Scalar>::Zero(a.n_rows);
    for (index_t r = 0; r < a.n_rows; ++r) {
        Scalar acc = Scalar(0);
        for (index_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
            acc += a.values[k] * x(a.col_idx[k]);
        y(r) = acc;
    }
    return y;
}

/// C = A B by row-wise CSR traversal; the reference ("oracle") SpMM the tiled
/// kernel is checked against.
template <class Scalar, class Derived>
Matrix<Scalar> naive_spmm(const CsrMatrix<Scalar>& a, const Eigen::MatrixBase<Derived>& b) {
    if (b.rows() != a.n_cols)
        throw DimensionError("naive_spmm: B row count does not match A column count");
    Matrix<Scalar> c = Matrix<Scalar>::Zero(a.n_rows, b.cols());
    for (index_t r = 0; r < a.n_rows; ++r)
        for (index_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
            c.row(r) += a.values[k] * b.row(a.col_idx[k]);
    return c;
}

}  // namespace adapoly
