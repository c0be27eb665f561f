#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "adapoly/types.hpp"

namespace adapoly {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Each (seed, stream, counter) triple maps to four 32-bit words through a
/// fixed 10-round bijection, so any draw can be addressed directly by index
/// and identical seeds reproduce identical streams regardless of how many
/// draws other code consumed. Stateless and safe to share across threads.
class Philox4x32 {
public:
    Philox4x32(std::uint64_t seed, std::uint64_t stream)
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32)),
          stream_(stream) {}

    std::array<std::uint32_t, 4> block(std::uint64_t counter) const {
        std::uint32_t c0 = static_cast<std::uint32_t>(counter);
        std::uint32_t c1 = static_cast<std::uint32_t>(counter >> 32);
        std::uint32_t c2 = static_cast<std::uint32_t>(stream_);
        std::uint32_t c3 = static_cast<std::uint32_t>(stream_ >> 32);
        std::uint32_t k0 = key0_;
        std::uint32_t k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            if (round != 0) {
                k0 += 0x9E3779B9u;
                k1 += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c0;
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c2;
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            const std::uint32_t n0 = hi1 ^ c1 ^ k0;
            const std::uint32_t n2 = hi0 ^ c3 ^ k1;
            c0 = n0;
            c1 = lo1;
            c2 = n2;
            c3 = lo0;
        }
        return {c0, c1, c2, c3};
    }

    /// Uniform double in (0,1): (word + 1/2) / 2^32, never exactly 0 or 1.
    double uniform(std::uint64_t i) const {
        return (static_cast<double>(word(i)) + 0.5) * 0x1p-32;
    }

    /// Standard normal draw i, Box-Muller on consecutive word pairs.
    double gaussian(std::uint64_t i) const {
        const auto b = block(i / 4);
        const std::size_t pair = (i % 4) / 2;
        const double u1 = (static_cast<double>(b[2 * pair]) + 0.5) * 0x1p-32;
        const double u2 = (static_cast<double>(b[2 * pair + 1]) + 0.5) * 0x1p-32;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        return (i % 2 == 0) ? r * std::cos(t) : r * std::sin(t);
    }

    /// +1 or -1 with equal probability (top bit of the word).
    double rademacher(std::uint64_t i) const {
        return (word(i) >> 31) != 0 ? 1.0 : -1.0;
    }

private:
    std::uint32_t word(std::uint64_t i) const { return block(i / 4)[i % 4]; }

    std::uint32_t key0_;
    std::uint32_t key1_;
    std::uint64_t stream_;
};

/// Stream ids used by the solver; fixed so that every random draw in a run
/// has a documented address.
namespace rng_stream {
inline constexpr std::uint64_t initial_basis = 0;
inline constexpr std::uint64_t lanczos = 1;
inline constexpr std::uint64_t trace_probes = 2;
inline constexpr std::uint64_t basis_topup = 3;
}  // namespace rng_stream

/// Fill a matrix with standard normal entries addressed in storage order.
inline void fill_gaussian(Eigen::Ref<Matrixd> out, std::uint64_t seed,
                          std::uint64_t stream) {
    const Philox4x32 rng(seed, stream);
    const index_t n = out.rows();
    for (index_t c = 0; c < out.cols(); ++c)
        for (index_t r = 0; r < n; ++r)
            out(r, c) = rng.gaussian(static_cast<std::uint64_t>(c * n + r));
}

/// Fill a matrix with +-1 entries addressed in storage order.
inline void fill_rademacher(Eigen::Ref<Matrixd> out, std::uint64_t seed,
                            std::uint64_t stream) {
    const Philox4x32 rng(seed, stream);
    const index_t n = out.rows();
    for (index_t c = 0; c < out.cols(); ++c)
        for (index_t r = 0; r < n; ++r)
            out(r, c) = rng.rademacher(static_cast<std::uint64_t>(c * n + r));
}

}  // namespace adapoly
