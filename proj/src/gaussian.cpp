#include "zerocorr/gaussian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "zerocorr/errors.hpp"
#include "zerocorr/parallel.hpp"
#include "zerocorr/rng.hpp"

namespace zerocorr {

GaussianSpec::GaussianSpec(ComplexMatrix covariance) : covariance_(std::move(covariance)) {
    if (!covariance_.square()) throw InvalidArgument("covariance must be square");
    if (!covariance_.is_hermitian(1e-12)) throw InvalidArgument("covariance must be Hermitian");
}

cplx wick_mixed_moment(const GaussianSpec& spec, std::span<const int> holo, std::span<const int> anti) {
    if (holo.size() != anti.size()) return 0.0;
    const std::size_t l = holo.size();
    if (l > kMaxWickOrder) throw SizeLimitExceeded("Wick moment of order " + std::to_string(l) + " > 10");
    const auto in_range = [&](int i) { return i >= 0 && static_cast<std::size_t>(i) < spec.dim(); };
    if (!std::all_of(holo.begin(), holo.end(), in_range) || !std::all_of(anti.begin(), anti.end(), in_range))
        throw InvalidArgument("Wick index out of range");

    ComplexMatrix pairing(l, l);
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < l; ++j) pairing(i, j) = spec.covariance()(holo[i], anti[j]);
    return permanent(pairing);
}

namespace {

// chol(a) computed as D^{-1} chol(D a D) with D = diag(a_ii^{-1/2}); the factor is the
// same, but the pivot test no longer trips on diagonals spanning many decades.
ComplexMatrix equilibrated_cholesky(const ComplexMatrix& a) {
    const std::size_t n = a.rows();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double aii = a(i, i).real();
        if (!(aii > 0.0)) throw NotPositiveDefinite("diagonal entry " + std::to_string(i) + " is not positive");
        d[i] = 1.0 / std::sqrt(aii);
    }
    ComplexMatrix scaled = a;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scaled(i, j) *= d[i] * d[j];
    ComplexMatrix l = cholesky(scaled);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) l(i, j) /= d[i];
    return l;
}

}  // namespace

ComplexMatrix sample_complex_gaussian(const GaussianSpec& spec, std::size_t count, std::uint64_t seed) {
    if (count < 1) throw InvalidArgument("sample count must be >= 1");
    const ComplexMatrix l = equilibrated_cholesky(spec.covariance());
    const std::size_t d = spec.dim();
    ComplexMatrix out(count, d);
    std::vector<cplx> g(d);
    for (std::size_t row = 0; row < count; ++row) {
        CounterRng rng(seed, row);
        for (auto& v : g) v = rng.complex_normal();
        for (std::size_t i = 0; i < d; ++i) {
            cplx s = 0.0;
            for (std::size_t j = 0; j <= i; ++j) s += l(i, j) * g[j];
            out(row, i) = s;
        }
    }
    return out;
}

namespace {

struct Permutation {
    std::vector<int> image;
    int sign;
};

std::vector<Permutation> permutations_with_sign(int k) {
    std::vector<int> p(k);
    std::iota(p.begin(), p.end(), 0);
    std::vector<Permutation> out;
    do {
        int inversions = 0;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
                if (p[i] > p[j]) ++inversions;
        out.push_back({p, inversions % 2 == 0 ? 1 : -1});
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

Estimate exact_det_product(const ComplexMatrix& lambda, int n, int k, int m) {
    const int pairs = n * k;
    const auto perms = permutations_with_sign(k);
    const int perm_count = static_cast<int>(perms.size());

    // Mixed-radix counters over (σ_1..σ_n) and the q index of every (p, j) slot.
    std::vector<int> sigma(n, 0);
    std::vector<int> q(pairs, 0);
    std::vector<std::size_t> holo(pairs), anti(pairs);
    ComplexMatrix pairing(pairs, pairs);

    cplx total = 0.0;
    while (true) {
        int sign = 1;
        for (int p = 0; p < n; ++p) sign *= perms[sigma[p]].sign;

        std::fill(q.begin(), q.end(), 0);
        while (true) {
            for (int p = 0; p < n; ++p)
                for (int j = 0; j < k; ++j) {
                    const int slot = p * k + j;
                    holo[slot] = jet_index(p, j, q[slot], k, m);
                    anti[slot] = jet_index(p, perms[sigma[p]].image[j], q[slot], k, m);
                }
            bool zero_row = false;
            for (int i = 0; i < pairs && !zero_row; ++i) {
                bool any = false;
                for (int j = 0; j < pairs; ++j) {
                    pairing(i, j) = lambda(holo[i], anti[j]);
                    any = any || pairing(i, j) != cplx{};
                }
                zero_row = !any;
            }
            if (!zero_row) total += static_cast<double>(sign) * permanent(pairing);

            int pos = 0;
            while (pos < pairs && ++q[pos] == m) q[pos++] = 0;
            if (pos == pairs) break;
        }

        int pos = 0;
        while (pos < n && ++sigma[pos] == perm_count) sigma[pos++] = 0;
        if (pos == n) break;
    }
    return {total.real(), 0.0};
}

double small_hermitian_det(std::array<cplx, 16>& g, int k) {
    if (k == 1) return g[0].real();
    if (k == 2) return (g[0] * g[3] - g[1] * g[2]).real();
    cplx det = 1.0;
    for (int c = 0; c < k; ++c) {
        int piv = c;
        for (int r = c + 1; r < k; ++r)
            if (std::abs(g[r * k + c]) > std::abs(g[piv * k + c])) piv = r;
        if (g[piv * k + c] == cplx{}) return 0.0;
        if (piv != c) {
            for (int j = 0; j < k; ++j) std::swap(g[c * k + j], g[piv * k + j]);
            det = -det;
        }
        det *= g[c * k + c];
        for (int r = c + 1; r < k; ++r) {
            const cplx f = g[r * k + c] / g[c * k + c];
            for (int j = c + 1; j < k; ++j) g[r * k + j] -= f * g[c * k + j];
        }
    }
    return det.real();
}

struct RunningStats {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double x) {
        count += 1.0;
        const double delta = x - mean;
        mean += delta / count;
        m2 += delta * (x - mean);
    }

    void merge(const RunningStats& o) {
        if (o.count == 0.0) return;
        const double total = count + o.count;
        const double delta = o.mean - mean;
        mean += delta * o.count / total;
        m2 += o.m2 + delta * delta * count * o.count / total;
        count = total;
    }
};

Estimate monte_carlo_det_product(const ComplexMatrix& lambda, int n, int k, int m, const MonteCarloMethod& mc) {
    if (mc.samples < 2) throw InvalidArgument("Monte Carlo needs at least 2 samples");
    const ComplexMatrix l = equilibrated_cholesky(lambda);
    const std::size_t d = lambda.rows();
    const std::uint64_t chunks = (mc.samples + kMonteCarloChunk - 1) / kMonteCarloChunk;
    std::vector<RunningStats> partial(chunks);

    parallel_for(chunks, [&](std::size_t c) {
        CounterRng rng(mc.seed, c);
        const std::uint64_t begin = c * kMonteCarloChunk;
        const std::uint64_t end = std::min<std::uint64_t>(mc.samples, begin + kMonteCarloChunk);
        std::vector<cplx> g(d), a(d);
        std::array<cplx, 16> gram{};
        RunningStats stats;
        for (std::uint64_t s = begin; s < end; ++s) {
            for (auto& v : g) v = rng.complex_normal();
            for (std::size_t i = 0; i < d; ++i) {
                cplx acc = 0.0;
                for (std::size_t j = 0; j <= i; ++j) acc += l(i, j) * g[j];
                a[i] = acc;
            }
            double product = 1.0;
            for (int p = 0; p < n; ++p) {
                for (int j = 0; j < k; ++j)
                    for (int jp = 0; jp < k; ++jp) {
                        cplx acc = 0.0;
                        for (int q = 0; q < m; ++q)
                            acc += a[jet_index(p, j, q, k, m)] * std::conj(a[jet_index(p, jp, q, k, m)]);
                        gram[j * k + jp] = acc;
                    }
                product *= small_hermitian_det(gram, k);
            }
            stats.push(product);
        }
        partial[c] = stats;
    });

    RunningStats total;
    for (const auto& s : partial) total.merge(s);
    const double variance = total.m2 / (total.count - 1.0);
    return {total.mean, std::sqrt(variance / total.count)};
}

}  // namespace

Estimate expectation_det_product(const ComplexMatrix& lambda, int n, int k, int m, const ExpectationMethod& method) {
    if (n < 1 || k < 1 || m < 1 || k > m) throw InvalidArgument("need n >= 1 and 1 <= k <= m");
    const auto size = static_cast<std::size_t>(n * k * m);
    if (lambda.rows() != size || lambda.cols() != size)
        throw InvalidArgument("Λ must be (n*k*m) x (n*k*m) = " + std::to_string(size));
    if (!lambda.is_hermitian(1e-10)) throw InvalidArgument("Λ must be Hermitian");

    if (std::holds_alternative<ExactMethod>(method)) {
        if (n * k > kMaxExactPairing || m > 4)
            throw SizeLimitExceeded("exact expectation needs k*n <= 8 and m <= 4 (got k*n=" +
                                    std::to_string(n * k) + ", m=" + std::to_string(m) + ")");
        return exact_det_product(lambda, n, k, m);
    }
    if (k > 4) throw SizeLimitExceeded("Monte Carlo determinant supports k <= 4");
    return monte_carlo_det_product(lambda, n, k, m, std::get<MonteCarloMethod>(method));
}

}  // namespace zerocorr
