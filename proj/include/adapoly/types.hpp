#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace adapoly {

using index_t = std::int64_t;

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrixd = Matrix<double>;
using Vectord = Vector<double>;

/// Malformed input stream. `line` is 1-based within the stream.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, index_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what),
          line_(line) {}

    index_t line() const { return line_; }

private:
    index_t line_;
};

class DimensionError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Cholesky factorization hit a non-positive pivot.
class NotPositiveDefinite : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace adapoly
