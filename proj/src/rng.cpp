#include "zerocorr/rng.hpp"

#include <cmath>
#include <numbers>

namespace zerocorr {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53U;
constexpr std::uint32_t kMul1 = 0xCD9E8D57U;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9U;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85U;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      counter_{0U, 0U, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

void CounterRng::refill() noexcept {
    std::array<std::uint32_t, 4> x = counter_;
    std::array<std::uint32_t, 2> k = key_;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, x[0], hi0, lo0);
        mulhilo(kMul1, x[2], hi1, lo1);
        x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    block_ = x;
    used_ = 0;
    // 64-bit position counter in the low words; the stream lives in the high words.
    if (++counter_[0] == 0) ++counter_[1];
}

CounterRng::result_type CounterRng::operator()() noexcept {
    if (used_ >= 4) refill();
    const std::uint64_t v = (static_cast<std::uint64_t>(block_[used_]) << 32) | block_[used_ + 1];
    used_ += 2;
    return v;
}

double CounterRng::uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

std::complex<double> CounterRng::complex_normal() noexcept {
    // |z|^2 ~ Exp(1) and an independent uniform phase.
    const double radius = std::sqrt(-std::log(uniform()));
    const double phase = 2.0 * std::numbers::pi * uniform();
    return {radius * std::cos(phase), radius * std::sin(phase)};
}

std::uint64_t CounterRng::poisson(double mean) noexcept {
    // Split large means into unit-free chunks so the product method never underflows.
    std::uint64_t total = 0;
    while (mean > 0.0) {
        const double chunk = std::min(mean, 500.0);
        mean -= chunk;
        const double limit = std::exp(-chunk);
        double prod = uniform();
        std::uint64_t k = 0;
        while (prod > limit) {
            prod *= uniform();
            ++k;
        }
        total += k;
    }
    return total;
}

}  // namespace zerocorr
