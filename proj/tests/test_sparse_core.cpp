#include <doctest.h>

#include <sstream>

#include "adapoly/matrix_market.hpp"
#include "adapoly/philox.hpp"
#include "adapoly/tiled_matrix.hpp"
#include "support/test_matrices.hpp"

using namespace adapoly;
using test_support::make_diag;
using test_support::make_identity;
using test_support::random_csr;
using test_support::random_symmetric;

namespace {

double rel_frobenius(const Matrixd& got, const Matrixd& want) {
    const double denom = want.norm();
    return denom > 0 ? (got - want).norm() / denom : (got - want).norm();
}

bool same_triplets(std::vector<Triplet<double>> a, std::vector<Triplet<double>> b) {
    const auto order = [](const Triplet<double>& x, const Triplet<double>& y) {
        return x.row != y.row ? x.row < y.row : x.col < y.col;
    };
    std::sort(a.begin(), a.end(), order);
    std::sort(b.begin(), b.end(), order);
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].row != b[i].row || a[i].col != b[i].col || a[i].value != b[i].value)
            return false;
    return true;
}

}  // namespace

TEST_CASE("matrix market: symmetric storage expands to both triangles") {
    std::istringstream in(
        "%%MatrixMarket matrix coordinate real symmetric\n"
        "2 2 2\n"
        "1 1 2.0\n"
        "2 1 -1.0\n");
    const CsrMatrixd a = parse_matrix_market(in);
    a.validate();
    CHECK(a.n_rows == 2);
    CHECK(a.nnz() == 3);
    CHECK(a.to_dense()(0, 0) == 2.0);
    CHECK(a.to_dense()(1, 0) == -1.0);
    CHECK(a.to_dense()(0, 1) == -1.0);
    CHECK(a.to_dense()(1, 1) == 0.0);
    CHECK(a.is_symmetric());
}

TEST_CASE("matrix market: empty general matrix") {
    std::istringstream in(
        "%%MatrixMarket matrix coordinate real general\n"
        "% a comment\n"
        "3 3 0\n");
    const CsrMatrixd a = parse_matrix_market(in);
    CHECK(a.n_rows == 3);
    CHECK(a.n_cols == 3);
    CHECK(a.row_ptr == std::vector<index_t>{0, 0, 0, 0});
}

TEST_CASE("matrix market: integer field accepted, duplicates summed") {
    std::istringstream in(
        "%%MatrixMarket matrix coordinate integer general\n"
        "2 2 3\n"
        "1 1 2\n"
        "1 1 3\n"
        "2 2 7\n");
    const CsrMatrixd a = parse_matrix_market(in);
    CHECK(a.nnz() == 2);
    CHECK(a.to_dense()(0, 0) == 5.0);
    CHECK(a.to_dense()(1, 1) == 7.0);
}

TEST_CASE("matrix market: errors name the offending line") {
    SUBCASE("pattern field rejected") {
        std::istringstream in("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n1 1\n");
        CHECK_THROWS_WITH_AS(parse_matrix_market(in),
                             doctest::Contains("line 1"), ParseError);
    }
    SUBCASE("complex field rejected") {
        std::istringstream in("%%MatrixMarket matrix coordinate complex general\n1 1 0\n");
        CHECK_THROWS_AS(parse_matrix_market(in), ParseError);
    }
    SUBCASE("array format rejected") {
        std::istringstream in("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n");
        CHECK_THROWS_AS(parse_matrix_market(in), ParseError);
    }
    SUBCASE("index out of declared bounds") {
        std::istringstream in(
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n");
        try {
            parse_matrix_market(in);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
    }
    SUBCASE("missing banner") {
        std::istringstream in("2 2 0\n");
        CHECK_THROWS_AS(parse_matrix_market(in), ParseError);
    }
    SUBCASE("truncated entries") {
        std::istringstream in("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n");
        CHECK_THROWS_AS(parse_matrix_market(in), ParseError);
    }
}

TEST_CASE("csr_spmv: identity and diagonal") {
    const CsrMatrixd eye = make_identity(3);
    Vectord x(3);
    x << 1, 2, 3;
    CHECK((csr_spmv(eye, x) - x).norm() == 0.0);

    const CsrMatrixd d = make_diag({2.0, -1.0});
    Vectord y(2);
    y << 1, 1;
    Vectord want(2);
    want << 2, -1;
    CHECK((csr_spmv(d, y) - want).norm() == 0.0);
}

TEST_CASE("csr_spmv matches the dense product on a random 50x50") {
    const CsrMatrixd a = random_csr(50, 50, 0.15, 11);
    const Matrixd dense = a.to_dense();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vectord x(50);
    for (index_t i = 0; i < 50; ++i) x(i) = u(rng);
    const Vectord got = csr_spmv(a, x);
    const Vectord want = dense * x;
    CHECK((got - want).norm() <= 1e-14 * want.norm());
}

TEST_CASE("csr_spmv rejects a length mismatch") {
    const CsrMatrixd eye = make_identity(3);
    CHECK_THROWS_AS(csr_spmv(eye, Vectord::Ones(4)), DimensionError);
}

TEST_CASE("naive_spmm: hand-checked examples") {
    const CsrMatrixd eye = make_identity(4);
    const Matrixd b = Matrixd::Random(4, 3);
    CHECK((naive_spmm(eye, b) - b).norm() == 0.0);

    const CsrMatrixd d = make_diag({2.0, 3.0});
    Matrixd b2(2, 2);
    b2 << 1, 2, 3, 4;
    Matrixd want(2, 2);
    want << 2, 4, 9, 12;
    CHECK((naive_spmm(d, b2) - want).norm() == 0.0);

    const CsrMatrixd a = CsrMatrixd::from_triplets(
        3, 3, {{0, 0, 1}, {0, 2, 2}, {1, 1, 3}, {2, 0, 4}, {2, 2, 5}});
    const Matrixd ones = Matrixd::Ones(3, 2);
    Matrixd expected(3, 2);
    expected << 3, 3, 3, 3, 9, 9;
    CHECK((naive_spmm(a, ones) - expected).norm() == 0.0);
}

TEST_CASE("csr_to_tiled: degenerate single block lists sorted distinct columns") {
    const CsrMatrixd a = random_csr(9, 9, 0.3, 3);
    const TiledMatrixd t = csr_to_tiled(a, 100, 8);
    CHECK(t.row_blocks() == 1);
    std::vector<index_t> distinct;
    for (index_t c = 0; c < a.n_cols; ++c)
        for (index_t r = 0; r < a.n_rows; ++r) {
            bool present = false;
            for (index_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
                if (a.col_idx[k] == c) present = true;
            if (present) {
                distinct.push_back(c);
                break;
            }
        }
    CHECK(t.col_idx == distinct);
}

TEST_CASE("csr_to_tiled: tridiagonal 4x4 with T_i = 2") {
    std::vector<Triplet<double>> t;
    for (index_t i = 0; i < 4; ++i) {
        t.push_back({i, i, 2.0});
        if (i > 0) t.push_back({i, i - 1, -1.0});
        if (i < 3) t.push_back({i, i + 1, -1.0});
    }
    const CsrMatrixd a = CsrMatrixd::from_triplets(4, 4, std::move(t));
    const TiledMatrixd tiled = csr_to_tiled(a, 2, 4);
    REQUIRE(tiled.row_blocks() == 2);
    // Block 0 holds rows {0,1} -> columns {0,1,2}; block 1 rows {2,3} -> {1,2,3}.
    const std::vector<index_t> block0(tiled.col_idx.begin() + tiled.act_colseg[0],
                                      tiled.col_idx.begin() + tiled.act_colseg[1]);
    const std::vector<index_t> block1(tiled.col_idx.begin() + tiled.act_colseg[1],
                                      tiled.col_idx.begin() + tiled.act_colseg[2]);
    CHECK(block0 == std::vector<index_t>{0, 1, 2});
    CHECK(block1 == std::vector<index_t>{1, 2, 3});
}

TEST_CASE("csr_to_tiled round-trips losslessly") {
    for (const index_t ti : {index_t{1}, index_t{3}, index_t{64}}) {
        const CsrMatrixd a = random_csr(37, 29, 0.2, 100 + static_cast<std::uint64_t>(ti));
        const TiledMatrixd t = csr_to_tiled(a, ti, 8);
        CHECK(same_triplets(t.to_triplets(), a.to_triplets()));
        // Row-block membership invariant.
        const index_t n_segs = static_cast<index_t>(t.col_idx.size());
        for (index_t ib = 0; ib < t.row_blocks(); ++ib) {
            for (index_t jj = t.act_colseg[ib]; jj < t.act_colseg[ib + 1]; ++jj) {
                REQUIRE(jj < n_segs);
                for (index_t ii = t.colseg_ptr[jj]; ii < t.colseg_ptr[jj + 1]; ++ii) {
                    CHECK(t.row_idx[ii] >= ib * ti);
                    CHECK(t.row_idx[ii] < std::min((ib + 1) * ti, t.n_rows));
                }
            }
        }
    }
    CHECK_THROWS_AS(csr_to_tiled(make_identity(3), 0, 4), ConfigError);
}

TEST_CASE("maspmm: identity and zero operators") {
    const Matrixd b = Matrixd::Random(8, 5);
    for (const index_t ti : {index_t{1}, index_t{3}, index_t{8}}) {
        const TiledMatrixd eye = csr_to_tiled(make_identity(8), ti, 2);
        const BlockMatrixd bb = to_block_layout<double>(b, 2);
        BlockMatrixd cc(8, 5, 2);
        maspmm(eye, bb, cc);
        CHECK((from_block_layout(cc) - b).norm() == 0.0);
    }

    const CsrMatrixd zero = CsrMatrixd::from_triplets(8, 8, {});
    const TiledMatrixd zt = csr_to_tiled(zero, 4, 2);
    const BlockMatrixd bb = to_block_layout<double>(b, 2);
    BlockMatrixd cc(8, 5, 2);
    maspmm(zt, bb, cc);
    CHECK(from_block_layout(cc).norm() == 0.0);
}

TEST_CASE("maspmm accumulates into a partial C") {
    const CsrMatrixd a = random_csr(10, 10, 0.4, 17);
    const Matrixd b = Matrixd::Random(10, 4);
    const TiledMatrixd t = csr_to_tiled(a, 3, 2);
    const BlockMatrixd bb = to_block_layout<double>(b, 2);
    BlockMatrixd cc(10, 4, 2);
    maspmm(t, bb, cc);
    maspmm(t, bb, cc);  // C += A B a second time
    CHECK(rel_frobenius(from_block_layout(cc), 2.0 * naive_spmm(a, b)) <= 1e-14);
}

TEST_CASE("maspmm equals naive_spmm across tilings (kernel equivalence)") {
    const CsrMatrixd a = random_csr(200, 200, 0.05, 42);
    Matrixd b(200, 32);
    fill_gaussian(b, 9, 0);
    const Matrixd want = naive_spmm(a, b);
    for (const auto [ti, tk] :
         {std::pair<index_t, index_t>{1, 1}, {7, 8}, {64, 64}, {200, 32}}) {
        const TiledMatrixd t = csr_to_tiled(a, ti, tk);
        const BlockMatrixd bb = to_block_layout<double>(b, tk);
        BlockMatrixd cc(200, 32, tk);
        maspmm(t, bb, cc);
        CHECK(rel_frobenius(from_block_layout(cc), want) <= 1e-13);
    }
}

TEST_CASE("maspmm is linear in B") {
    const CsrMatrixd a = random_symmetric(60, 0.1, 5);
    const TiledMatrixd t = csr_to_tiled(a, 16, 4);
    const Matrixd b1 = Matrixd::Random(60, 8);
    const Matrixd b2 = Matrixd::Random(60, 8);
    const double s1 = 0.37, s2 = -2.25;

    const auto apply = [&](const Matrixd& b) {
        const BlockMatrixd bb = to_block_layout<double>(b, 4);
        BlockMatrixd cc(60, 8, 4);
        maspmm(t, bb, cc);
        return from_block_layout(cc);
    };
    const Matrixd lhs = apply(s1 * b1 + s2 * b2);
    const Matrixd rhs = s1 * apply(b1) + s2 * apply(b2);
    CHECK(rel_frobenius(lhs, rhs) <= 1e-12);
}

TEST_CASE("maspmm is bitwise deterministic") {
    const CsrMatrixd a = random_csr(123, 123, 0.08, 77);
    const TiledMatrixd t = csr_to_tiled(a, 32, 8);
    Matrixd b(123, 17);
    fill_gaussian(b, 4, 2);
    const BlockMatrixd bb = to_block_layout<double>(b, 8);
    BlockMatrixd c1(123, 17, 8), c2(123, 17, 8);
    maspmm(t, bb, c1);
    maspmm(t, bb, c2);
    const Matrixd m1 = from_block_layout(c1);
    const Matrixd m2 = from_block_layout(c2);
    for (index_t i = 0; i < m1.size(); ++i) CHECK(m1.data()[i] == m2.data()[i]);
}

TEST_CASE("maspmm: K = 0 is a no-op, mismatches throw") {
    const TiledMatrixd t = csr_to_tiled(make_identity(6), 2, 4);
    const BlockMatrixd empty(6, 0, 4);
    BlockMatrixd out(6, 0, 4);
    maspmm(t, empty, out);  // no-op
    CHECK(out.size() == 0);

    const BlockMatrixd wrong_rows(5, 3, 4);
    BlockMatrixd c(6, 3, 4);
    CHECK_THROWS_AS(maspmm(t, wrong_rows, c), DimensionError);
    const BlockMatrixd wrong_tk(6, 3, 2);
    CHECK_THROWS_AS(maspmm(t, wrong_tk, c), DimensionError);
}

TEST_CASE("block layout round-trips and exposes coefficients") {
    const Matrixd m = Matrixd::Random(7, 11);
    const BlockMatrixd b = to_block_layout<double>(m, 4);
    CHECK(b.block_count() == 3);
    CHECK(b.block_width(2) == 3);
    for (index_t r = 0; r < 7; ++r)
        for (index_t c = 0; c < 11; ++c) CHECK(b(r, c) == m(r, c));
    CHECK((from_block_layout(b) - m).norm() == 0.0);
}
