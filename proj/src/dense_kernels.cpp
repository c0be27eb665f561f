#include "adapoly/dense_kernels.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace adapoly {

namespace {

/// Modified Gram-Schmidt with one reorthogonalization pass. Columns whose
/// norm collapses below tol relative to their input norm are dropped.
Matrixd mgs_orthonormalize(const Matrixd& x) {
    const index_t n = x.rows();
    Matrixd q(n, x.cols());
    index_t kept = 0;
    for (index_t j = 0; j < x.cols(); ++j) {
        Vectord v = x.col(j);
        const double orig = v.norm();
        for (int pass = 0; pass < 2; ++pass)
            for (index_t i = 0; i < kept; ++i) v -= q.col(i).dot(v) * q.col(i);
        const double nrm = v.norm();
        if (!(nrm > orig * 1e-13) || !(nrm > 0.0)) continue;  // dependent column
        q.col(kept) = v / nrm;
        ++kept;
    }
    return q.leftCols(kept);
}

}  // namespace

EigDecomposition sym_eig(const Matrixd& b) {
    if (b.rows() != b.cols()) throw DimensionError("sym_eig: matrix not square");
    if (!b.allFinite()) throw std::invalid_argument("sym_eig: non-finite entries");
    const Matrixd sym = 0.5 * (b + b.transpose());
    Eigen::SelfAdjointEigenSolver<Matrixd> es(sym);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("sym_eig: decomposition failed to converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

Matrixd cholesky(const Matrixd& g) {
    if (g.rows() != g.cols()) throw DimensionError("cholesky: matrix not square");
    if (!g.allFinite()) throw std::invalid_argument("cholesky: non-finite entries");
    const auto llt = g.selfadjointView<Eigen::Lower>().llt();
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("cholesky: non-positive pivot");
    Matrixd r = llt.matrixU();
    if (!r.allFinite() || (g.rows() > 0 && r.diagonal().minCoeff() <= 0.0))
        throw NotPositiveDefinite("cholesky: non-positive pivot");
    return r;
}

Matrixd cholesky_qr(const Matrixd& x) {
    const index_t p = x.cols();
    if (p == 0) return x;
    if (!x.allFinite()) throw std::invalid_argument("cholesky_qr: non-finite entries");

    Matrixd q;
    bool first_pass_ok = false;
    try {
        Matrixd g = x.transpose() * x;
        Matrixd r;
        try {
            r = cholesky(g);
        } catch (const NotPositiveDefinite&) {
            const double shift = 1e-14 * g.trace() / static_cast<double>(p);
            g.diagonal().array() += shift;
            r = cholesky(g);
        }
        // A pivot far below its column norm means a numerically dependent
        // column that squaring hid from the factorization; the Gram route
        // cannot produce a usable basis then.
        for (index_t j = 0; j < p; ++j)
            if (!(r(j, j) > 1e-7 * std::sqrt(g(j, j))))
                throw NotPositiveDefinite("cholesky_qr: rank-deficient input");
        q = r.triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(x);
        first_pass_ok = true;
    } catch (const NotPositiveDefinite&) {
        q = mgs_orthonormalize(x);
    }
    if (!first_pass_ok) return q;

    // Second pass (CholeskyQR2) tightens orthogonality to machine level.
    try {
        const Matrixd g2 = q.transpose() * q;
        const Matrixd r2 = cholesky(g2);
        q = r2.triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(q);
    } catch (const NotPositiveDefinite&) {
        q = mgs_orthonormalize(q);
    }
    return q;
}

RitzPairs rayleigh_ritz(const CsrMatrixd& a, const Matrixd& q) {
    if (q.rows() != a.n_rows)
        throw DimensionError("rayleigh_ritz: basis row count does not match A");
    const Matrixd aq = naive_spmm(a, q);
    const Matrixd b = q.transpose() * aq;
    EigDecomposition eig = sym_eig(b);
    return {std::move(eig.eigenvalues), q * eig.eigenvectors};
}

}  // namespace adapoly
