#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <limits>

namespace zerocorr {

/// Philox4x32-10 counter-based generator. A (seed, stream) pair fully
/// determines the output sequence, so any chunk of work can be replayed
/// independently of which worker runs it.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform on the open interval (0, 1), 53 bits.
    double uniform() noexcept;

    /// Circular complex standard normal: real and imaginary parts independent
    /// with mean 0 and variance 1/2, so E|z|^2 = 1.
    std::complex<double> complex_normal() noexcept;

    /// Poisson variate by the product-of-uniforms method, applied to chunks of
    /// mean <= 500 so exp(-mean) never underflows.
    std::uint64_t poisson(double mean) noexcept;

private:
    void refill() noexcept;

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 4> block_{};
    int used_ = 4;
};

}  // namespace zerocorr
