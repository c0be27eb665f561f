#pragma once

#include "adapoly/csr_matrix.hpp"
#include "adapoly/types.hpp"

namespace adapoly {

struct EigDecomposition {
    Vectord eigenvalues;   // ascending
    Matrixd eigenvectors;  // column i pairs with eigenvalues[i]
};

/// Full decomposition of a small symmetric matrix, eigenvalues ascending.
/// The input is symmetrized as (B + B^T)/2 before decomposition.
EigDecomposition sym_eig(const Matrixd& b);

/// Upper-triangular R with positive diagonal such that R^T R = G.
/// Throws NotPositiveDefinite on a non-positive pivot.
Matrixd cholesky(const Matrixd& g);

/// Orthonormalize the columns of X (tall-skinny). Two Cholesky-QR passes;
/// on factorization failure retries once with a diagonal shift and then
/// falls back to modified Gram-Schmidt with reorthogonalization. Dependent
/// columns are dropped, so the result may be narrower than X.
Matrixd cholesky_qr(const Matrixd& x);

struct RitzPairs {
    Vectord values;   // ascending
    Matrixd vectors;  // n x q, column i pairs with values[i]
};

/// Project A onto span(Q), decompose Q^T A Q, and lift the eigenvectors.
/// Q is assumed orthonormal.
RitzPairs rayleigh_ritz(const CsrMatrixd& a, const Matrixd& q);

}  // namespace adapoly
