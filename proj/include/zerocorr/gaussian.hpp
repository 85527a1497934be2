#pragma once

#include <cstdint>
#include <span>
#include <variant>

#include "zerocorr/numeric_core.hpp"

namespace zerocorr {

/// Circular complex Gaussian vector with covariance E[z_j z̄_k] = covariance(j, k)
/// and vanishing pseudo-covariance E[z_j z_k].
class GaussianSpec {
public:
    explicit GaussianSpec(ComplexMatrix covariance);

    std::size_t dim() const noexcept { return covariance_.rows(); }
    const ComplexMatrix& covariance() const noexcept { return covariance_; }

private:
    ComplexMatrix covariance_;
};

inline constexpr std::size_t kMaxWickOrder = 10;

/// E[∏ z_{holo[i]} ∏ z̄_{anti[j]}] as a permanent of covariance entries.
/// Zero when the two lists have different lengths.
cplx wick_mixed_moment(const GaussianSpec& spec, std::span<const int> holo, std::span<const int> anti);

/// count x dim matrix of draws L g, with L the Cholesky factor of the covariance.
/// Row i depends only on (seed, i).
ComplexMatrix sample_complex_gaussian(const GaussianSpec& spec, std::size_t count, std::uint64_t seed);

/// A value with its standard error; exact evaluations carry std_error == 0.
struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

struct ExactMethod {};

struct MonteCarloMethod {
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 0;
};

using ExpectationMethod = std::variant<ExactMethod, MonteCarloMethod>;

inline constexpr int kMaxExactPairing = 8;
inline constexpr std::uint64_t kMonteCarloChunk = 8192;

/// Row/column of the (p, j, q) component in an n*k*m jet covariance.
constexpr std::size_t jet_index(int p, int j, int q, int k, int m) {
    return static_cast<std::size_t>((p * k + j) * m + q);
}

/// ⟨∏_{p=1..n} det(Σ_q a^p_{jq} ā^p_{j'q})_{j,j'}⟩ for a ~ N_C(0, Λ), with Λ indexed by
/// jet_index(p, j, q). The exact route expands each determinant over S_k and every
/// q-assignment and reduces each monomial to a Wick permanent; it is limited to
/// k*n <= 8 and m <= 4. Monte Carlo runs deterministic chunks of kMonteCarloChunk
/// draws, chunk c seeded by (seed, c).
Estimate expectation_det_product(const ComplexMatrix& lambda, int n, int k, int m, const ExpectationMethod& method);

}  // namespace zerocorr
