#pragma once

#include <vector>

#include "zerocorr/gaussian.hpp"
#include "zerocorr/kernels.hpp"

namespace zerocorr {

/// Joint zero correlation of k independent sections at n points.
struct CorrelationQuery {
    KernelModel model = HeisenbergLimit{1};
    int k = 1;
    std::vector<Point> points;
    ExpectationMethod method = ExactMethod{};

    int n() const noexcept { return static_cast<int>(points.size()); }
};

/// Separation below which queries are rejected: 1e-3 in scaled units, i.e.
/// 1e-3 for the limit model and 1e-3/√N for the finite levels.
inline constexpr double kMinScaledSeparation = 1e-3;

/// Throws InvalidArgument / NearSingular / SizeLimitExceeded for queries outside
/// the supported envelope (n <= 3 exact for k = 1, n <= 2 exact for k = 2).
void validate(const CorrelationQuery& query);

/// Reduced blocks of the jet covariance. The full covariance carries a δ_{jj'}
/// factor over the k sections, so only per-section blocks are stored:
///   a(p, p')            = S(z^p, z^{p'})
///   b(p, p'*m + q')     = S_{q'}(z^p, z^{p'})
///   c(p*m + q, p'*m+q') = S_{qq'}(z^p, z^{p'})
struct CovarianceBlocks {
    ComplexMatrix a;
    ComplexMatrix b;
    ComplexMatrix c;
    int k = 1;
};

CovarianceBlocks assemble_blocks(const CorrelationQuery& query);

/// Reduced conditional covariance λ = c - b* a⁻¹ b (size n*m), symmetrized.
ComplexMatrix reduced_jet_covariance(const CovarianceBlocks& blocks);

/// Full Λ = δ_{jj'} ⊗ λ, indexed by jet_index(p, j, q).
ComplexMatrix jet_covariance(const CovarianceBlocks& blocks);

/// K_n(z) = ⟨∏_p det(a^p γ^p a^{p*})⟩_Λ / (π^{kn} (det a)^k). γ^p is the inverse
/// Fubini-Study metric for FubiniStudy and the identity for the Heisenberg models.
Estimate correlation(const CorrelationQuery& query);

/// K_n divided by the product of one-point densities of the same model.
Estimate normalized_correlation(const CorrelationQuery& query);

}  // namespace zerocorr
