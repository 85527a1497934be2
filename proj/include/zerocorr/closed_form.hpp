#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "zerocorr/kernels.hpp"

namespace zerocorr {

/// Scaling-limit pair correlation κ_{km}(r) of simultaneous zeros of k sections
/// in C^m, at scaled distance r.
struct KappaQuery {
    double r = 0.0;
    int m = 1;
    int k = 1;
};

/// Below these, κ switches from the closed form to its power series.
inline constexpr double kKappa1SeriesBelowT = 0.05;  // t = r²/2
inline constexpr double kKappa2SeriesBelowR = 0.2;   // only m = 2 (see kappa())

/// κ_{km}(r). k = 1 uses the sinh/cosh closed form (series for t < 0.05);
/// k = 2 uses the rational-exponential closed form, with the r⁴ series below
/// r = 0.2 when m = 2. Singular limits at r = 0 return +inf.
/// Throws DomainError for k = 2, m = 1 and InvalidArgument outside k ∈ {1,2}, k <= m.
double kappa(const KappaQuery& q);

/// The closed form alone, with no series fallback.
double kappa_closed_form(const KappaQuery& q);

/// Exact rational coefficient.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Rational&, const Rational&) = default;
};

Rational make_rational(std::int64_t num, std::int64_t den);

/// coeff * r^power.
struct SeriesTerm {
    int power = 0;
    Rational coeff;
};

/// Small-r expansion of κ_{km} as non-zero terms in powers of r, in
/// increasing order. k = 1: the general-m expansion through t¹³ (t = r²/2);
/// k = 2, m = 2: the series in r⁴ through r¹⁶; k = 2, m >= 3: through r⁶.
std::vector<SeriesTerm> kappa_series_terms(int m, int k);

/// Sum of the first `terms` series terms (all of them if terms exceeds the count).
double kappa_series(const KappaQuery& q, int terms = 1000);

/// Two-term large-r asymptote
///   k = 1: 1 + (r⁴ - 2(m²+1)r² + m(3m+1)) e^{-r²} / m²
///   k = 2: 1 + 2(r⁴ - 2(m+1)r² + m(m+1)) e^{-r²} / m²
double kappa_asymptote(const KappaQuery& q);

/// One-point zero density K_1 for k sections: N^k m!/((m-k)! π^k) at level N,
/// m!/((m-k)! π^k) in the limit.
double density(const KernelModel& model, int k);

/// Subsets of {1..n} as bitmasks: bit (i-1) set when point i belongs to it.
using Subset = std::uint32_t;

/// T̃_n from normalized correlations of every subset. Singletons default to 1.
/// Throws MissingSubset when a larger subset is absent, SizeLimitExceeded for n > 5.
double connected_correlation(const std::map<Subset, double>& kvalues, int n);

/// Applies connected_correlation to every subset of {1..n}.
std::map<Subset, double> connected_correlations_all(const std::map<Subset, double>& kvalues, int n);

/// Möbius inverse: K̃ of every subset from the connected correlations of all subsets.
std::map<Subset, double> correlations_from_connected(const std::map<Subset, double>& tvalues, int n);

/// max over connected multigraphs on the points (every vertex of degree >= 2,
/// at most 2n edges) of ∏_edges |z_i - z_f|² e^{-|z_i - z_f|²/2}. 2 <= n <= 3.
double decay_bound(const std::vector<Point>& points);

}  // namespace zerocorr
