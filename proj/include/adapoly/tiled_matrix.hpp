#pragma once

#include <algorithm>
#include <vector>

#include "adapoly/csr_matrix.hpp"
#include "adapoly/types.hpp"

namespace adapoly {

/// Default tile sizes. A double-precision 256x64 output tile is 128 KiB,
/// sized to stay resident in a typical L2 while a row block is accumulated.
inline constexpr index_t default_tile_ti = 256;
inline constexpr index_t default_tile_tk = 64;

/// Sparse matrix re-laid out for the tiled SpMM kernel.
///
/// Rows are grouped into blocks of height t_i. Within a row block, entries
/// are grouped into column segments: one segment per distinct column index,
/// segments ordered by column, entries within a segment ordered by row. Each
/// segment touches one contiguous row of the dense operand, which is what
/// the kernel exploits.
template <class Scalar>
struct TiledMatrix {
    index_t n_rows = 0;
    index_t n_cols = 0;
    index_t t_i = 0;  // row-block height
    index_t t_k = 0;  // dense column-block width the kernel pairs with

    std::vector<index_t> act_colseg{0};  // row block -> segment range
    std::vector<index_t> colseg_ptr{0};  // segment -> entry range
    std::vector<index_t> col_idx;        // one column per segment
    std::vector<index_t> row_idx;        // per entry
    std::vector<Scalar> values;          // per entry

    index_t nnz() const { return static_cast<index_t>(values.size()); }

    index_t row_blocks() const {
        return t_i > 0 ? (n_rows + t_i - 1) / t_i : 0;
    }

    /// Entries as (row, col, value) triplets, in layout order.
    std::vector<Triplet<Scalar>> to_triplets() const {
        std::vector<Triplet<Scalar>> out;
        out.reserve(static_cast<std::size_t>(nnz()));
        const index_t n_segs = static_cast<index_t>(col_idx.size());
        for (index_t jj = 0; jj < n_segs; ++jj)
            for (index_t ii = colseg_ptr[jj]; ii < colseg_ptr[jj + 1]; ++ii)
                out.push_back({row_idx[ii], col_idx[jj], values[ii]});
        return out;
    }
};

using TiledMatrixd = TiledMatrix<double>;

/// Regroup a CSR matrix into the column-segment layout. Lossless: the entry
/// multiset is preserved exactly.
template <class Scalar>
TiledMatrix<Scalar> csr_to_tiled(const CsrMatrix<Scalar>& a, index_t t_i, index_t t_k) {
    if (t_i < 1 || t_k < 1) throw ConfigError("csr_to_tiled: tile sizes must be >= 1");
    TiledMatrix<Scalar> t;
    t.n_rows = a.n_rows;
    t.n_cols = a.n_cols;
    t.t_i = t_i;
    t.t_k = t_k;
    t.row_idx.reserve(static_cast<std::size_t>(a.nnz()));
    t.values.reserve(static_cast<std::size_t>(a.nnz()));

    std::vector<Triplet<Scalar>> block_entries;
    for (index_t ib = 0; ib < t.row_blocks(); ++ib) {
        const index_t row_lo = ib * t_i;
        const index_t row_hi = std::min(row_lo + t_i, a.n_rows);
        block_entries.clear();
        for (index_t r = row_lo; r < row_hi; ++r)
            for (index_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
                block_entries.push_back({r, a.col_idx[k], a.values[k]});
        // (col, row) pairs are unique within a block, so this order is total.
        std::sort(block_entries.begin(), block_entries.end(),
                  [](const Triplet<Scalar>& x, const Triplet<Scalar>& y) {
                      return x.col != y.col ? x.col < y.col : x.row < y.row;
                  });
        for (std::size_t i = 0; i < block_entries.size();) {
            const index_t col = block_entries[i].col;
            t.col_idx.push_back(col);
            for (; i < block_entries.size() && block_entries[i].col == col; ++i) {
                t.row_idx.push_back(block_entries[i].row);
                t.values.push_back(block_entries[i].value);
            }
            t.colseg_ptr.push_back(static_cast<index_t>(t.values.size()));
        }
        t.act_colseg.push_back(static_cast<index_t>(t.col_idx.size()));
    }
    return t;
}

/// Dense matrix in the row-segment layout the tiled kernel operates on:
/// column blocks of width t_k, and within a block row r occupies one
/// contiguous span of block_width scalars. The backing store is a single
/// contiguous array, so elementwise updates can ignore the blocking.
template <class Scalar>
class BlockMatrix {
public:
    BlockMatrix() = default;

    BlockMatrix(index_t rows, index_t cols, index_t t_k)
        : rows_(rows), cols_(cols), t_k_(t_k) {
        if (rows < 0 || cols < 0 || t_k < 1)
            throw DimensionError("BlockMatrix: invalid shape");
        offsets_.assign(1, 0);
        for (index_t b = 0; b < block_count(); ++b)
            offsets_.push_back(offsets_.back() + rows_ * block_width(b));
        data_.assign(static_cast<std::size_t>(offsets_.back()), Scalar(0));
    }

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }
    index_t block_tk() const { return t_k_; }
    index_t block_count() const { return cols_ == 0 ? 0 : (cols_ + t_k_ - 1) / t_k_; }
    index_t block_width(index_t b) const {
        return std::min(t_k_, cols_ - b * t_k_);
    }

    Scalar* block(index_t b) { return data_.data() + offsets_[b]; }
    const Scalar* block(index_t b) const { return data_.data() + offsets_[b]; }

    Scalar* data() { return data_.data(); }
    const Scalar* data() const { return data_.data(); }
    index_t size() const { return static_cast<index_t>(data_.size()); }

    void set_zero() { std::fill(data_.begin(), data_.end(), Scalar(0)); }

    Scalar operator()(index_t r, index_t c) const {
        const index_t b = c / t_k_;
        return data_[offsets_[b] + r * block_width(b) + (c - b * t_k_)];
    }
    Scalar& operator()(index_t r, index_t c) {
        const index_t b = c / t_k_;
        return data_[offsets_[b] + r * block_width(b) + (c - b * t_k_)];
    }

private:
    index_t rows_ = 0;
    index_t cols_ = 0;
    index_t t_k_ = 1;
    std::vector<index_t> offsets_{0};
    std::vector<Scalar> data_;
};

using BlockMatrixd = BlockMatrix<double>;

template <class Scalar>
BlockMatrix<Scalar> to_block_layout(const Eigen::Ref<const Matrix<Scalar>>& m, index_t t_k) {
    BlockMatrix<Scalar> out(m.rows(), m.cols(), t_k);
    for (index_t b = 0; b < out.block_count(); ++b) {
        const index_t c0 = b * t_k;
        const index_t w = out.block_width(b);
        Scalar* dst = out.block(b);
        for (index_t r = 0; r < m.rows(); ++r)
            for (index_t c = 0; c < w; ++c) dst[r * w + c] = m(r, c0 + c);
    }
    return out;
}

template <class Scalar>
Matrix<Scalar> from_block_layout(const BlockMatrix<Scalar>& m) {
    Matrix<Scalar> out(m.rows(), m.cols());
    for (index_t b = 0; b < m.block_count(); ++b) {
        const index_t c0 = b * m.block_tk();
        const index_t w = m.block_width(b);
        const Scalar* src = m.block(b);
        for (index_t r = 0; r < m.rows(); ++r)
            for (index_t c = 0; c < w; ++c) out(r, c0 + c) = src[r * w + c];
    }
    return out;
}

/// C += A B, tiled kernel.
///
/// Outer loop walks dense column blocks; row blocks run in parallel inside a
/// column block, each worker owning one T_i x T_k tile of C. For every column
/// segment the matching row segment of B is loaded once and broadcast-FMAed
/// into the rows of the tile. Accumulation order per tile is fixed by the
/// layout, so the result is bitwise reproducible for any worker count.
template <class Scalar>
void maspmm(const TiledMatrix<Scalar>& a, const BlockMatrix<Scalar>& b,
            BlockMatrix<Scalar>& c) {
    if (b.rows() != a.n_cols || c.rows() != a.n_rows || c.cols() != b.cols())
        throw DimensionError("maspmm: shape mismatch");
    if (b.block_tk() != a.t_k || c.block_tk() != a.t_k)
        throw DimensionError("maspmm: dense block width does not match the tiling");
    if (b.cols() == 0) return;

    const index_t n_row_blocks = a.row_blocks();
    for (index_t blk = 0; blk < b.block_count(); ++blk) {
        const index_t width = b.block_width(blk);
        const Scalar* bdata = b.block(blk);
        Scalar* cdata = c.block(blk);
#pragma omp parallel for schedule(static)
        for (index_t ib = 0; ib < n_row_blocks; ++ib) {
            for (index_t jj = a.act_colseg[ib]; jj < a.act_colseg[ib + 1]; ++jj) {
                const Scalar* bseg = bdata + a.col_idx[jj] * width;
                for (index_t ii = a.colseg_ptr[jj]; ii < a.colseg_ptr[jj + 1]; ++ii) {
                    Scalar* cseg = cdata + a.row_idx[ii] * width;
                    const Scalar v = a.values[ii];
                    for (index_t t = 0; t < width; ++t) cseg[t] += v * bseg[t];
                }
            }
        }
    }
}

}  // namespace adapoly
