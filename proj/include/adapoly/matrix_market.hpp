#pragma once

#include <iosfwd>
#include <string>

#include "adapoly/csr_matrix.hpp"

namespace adapoly {

/// Parse a Matrix Market coordinate stream (field real or integer, symmetry
/// general or symmetric). Symmetric storage is expanded to full storage,
/// duplicates are summed, indices converted to 0-based, rows sorted.
/// Throws ParseError naming the offending line.
CsrMatrixd parse_matrix_market(std::istream& in);

/// Convenience overload reading from a file path.
CsrMatrixd read_matrix_market(const std::string& path);

}  // namespace adapoly
