#pragma once

#include <cstdint>

#include "zerocorr/kernels.hpp"
#include "zerocorr/numeric_core.hpp"
#include "zerocorr/rng.hpp"

namespace zerocorr::testing {

inline ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    CounterRng rng(seed, 0xabcdef);
    ComplexMatrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) a(i, j) = rng.complex_normal();
    return a;
}

// G G*/n + I/2: well conditioned, Hermitian positive definite.
inline ComplexMatrix random_hpd(std::size_t n, std::uint64_t seed) {
    const ComplexMatrix g = random_matrix(n, n, seed);
    ComplexMatrix a = g * g.adjoint();
    a *= 1.0 / static_cast<double>(n);
    a += 0.5 * ComplexMatrix::identity(n);
    return a;
}

inline Point random_point(int m, double radius, CounterRng& rng) {
    Point p(m);
    for (auto& v : p) v = radius * (2.0 * rng.uniform() - 1.0) * std::polar(1.0, 6.283185307179586 * rng.uniform());
    return p;
}

}  // namespace zerocorr::testing
