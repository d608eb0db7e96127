#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace bscatter {

/// Counter-based Philox4x32-10 generator. Each (seed, stream) pair names an
/// independent sequence, so a Monte Carlo trial can own stream = trial index
/// and produce the same draws no matter which thread runs it.
///
/// Satisfies UniformRandomBitGenerator with 64-bit output.
class RandomStream {
public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Uniform on the open interval (0, 1).
    double uniform_open() noexcept;
    /// Unit-rate exponential.
    double exponential() noexcept;
    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_normal(double variance) noexcept;
    /// Poisson draw. Exact inversion, in chunks for large means.
    std::uint64_t poisson(double mean) noexcept;

private:
    void refill() noexcept;

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 4> block_{};
    int used_ = 4;
};

/// Philox4x32-10 bijection; exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

}  // namespace bscatter
