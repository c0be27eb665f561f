#include "adapoly/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>
#include <vector>

namespace adapoly {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

CsrMatrixd parse_matrix_market(std::istream& in) {
    std::string line;
    index_t line_no = 0;

    if (!std::getline(in, line)) throw ParseError("empty stream", 1);
    ++line_no;
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (lower(tag) != "%%matrixmarket")
        throw ParseError("missing %%MatrixMarket banner", line_no);
    if (lower(object) != "matrix")
        throw ParseError("unsupported object '" + object + "'", line_no);
    if (lower(format) != "coordinate")
        throw ParseError("unsupported format '" + format + "' (coordinate required)", line_no);
    field = lower(field);
    if (field != "real" && field != "integer")
        throw ParseError("unsupported field '" + field + "' (real or integer required)", line_no);
    symmetry = lower(symmetry);
    if (symmetry != "general" && symmetry != "symmetric")
        throw ParseError("unsupported symmetry '" + symmetry + "'", line_no);
    const bool symmetric = symmetry == "symmetric";

    // Comments, then the size line.
    index_t rows = -1, cols = -1, declared_nnz = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '%') continue;
        std::istringstream size_line(line);
        if (!(size_line >> rows >> cols >> declared_nnz) || rows < 0 || cols < 0 ||
            declared_nnz < 0)
            throw ParseError("malformed size line", line_no);
        break;
    }
    if (rows < 0) throw ParseError("missing size line", line_no + 1);

    std::vector<Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(symmetric ? 2 * declared_nnz : declared_nnz));
    index_t seen = 0;
    while (seen < declared_nnz) {
        if (!std::getline(in, line))
            throw ParseError("unexpected end of stream, expected " +
                                 std::to_string(declared_nnz) + " entries, got " +
                                 std::to_string(seen),
                             line_no + 1);
        ++line_no;
        if (line.empty() || line[0] == '%') continue;
        std::istringstream entry(line);
        index_t i, j;
        double v;
        if (!(entry >> i >> j >> v)) throw ParseError("malformed entry", line_no);
        if (i < 1 || i > rows || j < 1 || j > cols)
            throw ParseError("index out of declared bounds", line_no);
        entries.push_back({i - 1, j - 1, v});
        if (symmetric && i != j) entries.push_back({j - 1, i - 1, v});
        ++seen;
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line[0] != '%') {
            std::istringstream rest(line);
            std::string token;
            if (rest >> token) throw ParseError("data past the declared entry count", line_no);
        }
    }

    return CsrMatrixd::from_triplets(rows, cols, std::move(entries));
}

CsrMatrixd read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open matrix file: " + path);
    return parse_matrix_market(in);
}

}  // namespace adapoly
