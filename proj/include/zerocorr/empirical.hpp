#pragma once

#include <cstdint>
#include <vector>

#include "zerocorr/numeric_core.hpp"

namespace zerocorr {

/// SU(2) polynomial in the affine chart, p(z) = Σ_j coeffs[j] z^j with
/// coeffs[j] = sqrt(binom(N, j)) c_j and c_j i.i.d. standard complex Gaussians.
struct PolynomialSample {
    int degree = 0;
    std::vector<cplx> coeffs;
};

inline constexpr int kMaxPolynomialDegree = 2000;

/// Deterministic in (N, seed, stream).
PolynomialSample sample_su2_polynomial(int N, std::uint64_t seed, std::uint64_t stream = 0);

/// Degree after dropping leading coefficients below 1e-13 * max |coeff|; the
/// dropped roots sit at infinity, outside the affine chart.
int effective_degree(const PolynomialSample& p);

enum class RootMethod {
    aberth,     ///< Aberth-Ehrlich simultaneous iteration, O(N²) per sweep
    companion,  ///< balanced companion-matrix eigenvalues, O(N³), refined by Aberth sweeps
};

/// All affine roots, Newton-polished until |p(z)| <= 1e-10 Σ_j |coeffs[j] z^j|.
/// Aberth falls back to the companion route if it stalls.
/// Throws RootFindingFailed if a root cannot be polished to that residual.
std::vector<cplx> polynomial_roots(const PolynomialSample& p, RootMethod method = RootMethod::aberth);

/// |p(z)| / Σ_j |coeffs[j] z^j|, evaluated without overflow for large |z|.
double relative_residual(const PolynomialSample& p, cplx z);

/// Scaled Fubini-Study distance √N d_FS(z1, z2), where d_FS is the geodesic
/// distance of the metric |dz|²/(1+|z|²)² (CP¹ of area π).
double scaled_fs_distance(int N, cplx z1, cplx z2);

/// Pair counts of the scaled zero process, with the Poisson expectation for each bin.
struct PairHistogram {
    std::vector<double> bin_edges;
    std::vector<std::uint64_t> counts;
    std::vector<double> count_squares;  ///< Σ over samples of (per-sample count)²
    std::vector<double> normalizer;
    std::uint64_t samples = 0;

    std::size_t bins() const noexcept { return counts.size(); }
    double g_estimate(std::size_t b) const;
    /// Standard error of g_estimate from the spread of per-sample counts.
    double std_error(std::size_t b) const;
};

enum class PointSource {
    su2_roots,       ///< roots of sampled SU(2) polynomials
    poisson_sphere,  ///< Poisson(N) uniform points on CP¹, for estimator calibration
};

struct PairCorrelationConfig {
    int N = 500;
    std::uint64_t samples = 2000;
    double window = 3.0;  ///< R_w: centers are points with √N |z| <= R_w
    std::vector<double> bin_edges;
    std::uint64_t seed = 0;
    PointSource source = PointSource::su2_roots;
};

inline constexpr double kMaxWindow = 3.0;

/// Estimates κ₁₁ on each bin. Every point with √N|z| <= R_w is a center; ordered
/// pairs (center, other) are binned by scaled_fs_distance. Partners are taken from
/// the whole sphere, so there is no edge loss, and the normalizer is the exact
/// Poisson expectation
///   samples · N R_w² / (1 + R_w²/N) · (sin²(b/√N) - sin²(a/√N))
/// for bin [a, b), which tends to samples · ρ² · πR_w² · π(b² - a²) with ρ = 1/π.
/// Throws WindowTooLarge (R_w > 3 or last edge > R_w) and InsufficientDegree (N < 25 R_w²).
PairHistogram pair_correlation_estimate(const PairCorrelationConfig& config);

/// Per-bin counts of ordered pairs (center, other) in one point configuration
/// given in affine coordinates.
std::vector<std::uint64_t> count_pairs(const std::vector<cplx>& points, int N, double window,
                                       const std::vector<double>& bin_edges);

/// Expected pair count per bin for a Poisson process of intensity N/π on CP¹.
std::vector<double> poisson_normalizer(int N, double window, const std::vector<double>& bin_edges,
                                       std::uint64_t samples);

}  // namespace zerocorr
