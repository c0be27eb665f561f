#pragma once

#include <cstdint>

#include "adapoly/cheb_filter.hpp"
#include "adapoly/csr_matrix.hpp"

namespace adapoly {

/// Enclose the spectrum of a symmetric operator with a few Lanczos steps
/// (full reorthogonalization, seeded random start). Returns
/// [theta_min - r_min, theta_max + r_max] where theta are the extreme Ritz
/// values of the Lanczos tridiagonal and r their residual bounds. On
/// breakdown the iteration restarts from a fresh random vector, at most
/// three times, and the enclosures are merged. A degenerate spectrum is
/// widened so the bounds always have positive width. Deterministic per seed.
SpectrumBounds estimate_spectrum_bounds(const CsrMatrixd& a, int steps,
                                        std::uint64_t seed,
                                        std::int64_t* spmv_count = nullptr);

}  // namespace adapoly
