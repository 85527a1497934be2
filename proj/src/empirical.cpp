#include "zerocorr/empirical.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "zerocorr/errors.hpp"
#include "zerocorr/parallel.hpp"
#include "zerocorr/rng.hpp"

namespace zerocorr {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPolishTolerance = 1e-10;
constexpr int kAberthMaxSweeps = 500;
constexpr int kNewtonMaxSteps = 20;

// Value, derivative ratio and termwise bound of a polynomial at z. For |z| > 1
// the reversed polynomial is evaluated in y = 1/z, which keeps every partial
// sum bounded; the common factor z^d cancels in both the ratio and the bound.
struct Evaluation {
    cplx newton;       // p / p'
    double residual;   // |p| / Σ|a_j z^j|
};

Evaluation evaluate(const std::vector<cplx>& a, int d, cplx z) {
    const double az = std::abs(z);
    if (az <= 1.0) {
        cplx p = a[d];
        cplx dp = 0.0;
        double bound = std::abs(a[d]);
        for (int j = d - 1; j >= 0; --j) {
            dp = dp * z + p;
            p = p * z + a[j];
            bound = bound * az + std::abs(a[j]);
        }
        return {p / dp, bound > 0.0 ? std::abs(p) / bound : 0.0};
    }
    const cplx y = 1.0 / z;
    const double ay = 1.0 / az;
    cplx q = a[0];
    cplx dq = 0.0;
    double bound = std::abs(a[0]);
    for (int j = 1; j <= d; ++j) {
        dq = dq * y + q;
        q = q * y + a[j];
        bound = bound * ay + std::abs(a[j]);
    }
    return {z * q / (static_cast<double>(d) * q - y * dq), bound > 0.0 ? std::abs(q) / bound : 0.0};
}

// Starting points on circles read off the upper convex hull of (j, log|a_j|).
std::vector<cplx> newton_polygon_start(const std::vector<cplx>& a, int d) {
    std::vector<int> hull;
    std::vector<double> lg(d + 1);
    for (int j = 0; j <= d; ++j) lg[j] = a[j] == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::abs(a[j]));
    for (int j = 0; j <= d; ++j) {
        if (std::isinf(lg[j])) continue;
        while (hull.size() >= 2) {
            const int i0 = hull[hull.size() - 2];
            const int i1 = hull.back();
            const double cross = (lg[i1] - lg[i0]) * (j - i0) - (lg[j] - lg[i0]) * (i1 - i0);
            if (cross <= 0.0) hull.pop_back();
            else break;
        }
        hull.push_back(j);
    }
    std::vector<cplx> z;
    z.reserve(d);
    constexpr double sigma = 0.7;
    for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
        const int count = hull[s + 1] - hull[s];
        const double radius = std::exp((lg[hull[s]] - lg[hull[s + 1]]) / count);
        for (int j = 0; j < count; ++j) {
            const double angle = 2.0 * std::numbers::pi * (static_cast<double>(j) / count + static_cast<double>(s) / d) + sigma;
            z.push_back(std::polar(radius, angle));
        }
    }
    return z;
}

// Aberth-Ehrlich sweeps in Gauss-Seidel order from the approximations in z.
bool aberth(const std::vector<cplx>& a, int d, std::vector<cplx>& z) {
    std::vector<char> done(d, 0);
    for (int sweep = 0; sweep < kAberthMaxSweeps; ++sweep) {
        bool all_done = true;
        for (int i = 0; i < d; ++i) {
            if (done[i]) continue;
            const Evaluation e = evaluate(a, d, z[i]);
            if (e.residual <= 4.0 * kEps || !std::isfinite(std::abs(e.newton))) {
                done[i] = 1;
                continue;
            }
            all_done = false;
            cplx repulsion = 0.0;
            for (int j = 0; j < d; ++j)
                if (j != i) repulsion += 1.0 / (z[i] - z[j]);
            const cplx step = e.newton / (1.0 - e.newton * repulsion);
            z[i] -= step;
            // A tiny step alone can mean two approximations have collided.
            if (std::abs(step) <= kEps * std::abs(z[i]) && e.residual <= kPolishTolerance) done[i] = 1;
        }
        if (all_done) return true;
    }
    // Stragglers wandering in rounding noise next to a root are left to polish().
    return std::all_of(z.begin(), z.end(), [&](cplx r) { return evaluate(a, d, r).residual <= kPolishTolerance; });
}

// Diagonal similarity with power-of-two factors equalizing row and column norms.
// The binomial weights span hundreds of decades, and without this the small
// roots drown in rounding error.
void balance(Eigen::MatrixXcd& c) {
    const auto n = c.rows();
    bool changed = true;
    while (changed) {
        changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            double col = 0.0, row = 0.0;
            for (Eigen::Index j = 0; j < n; ++j)
                if (j != i) {
                    col += std::abs(c(j, i));
                    row += std::abs(c(i, j));
                }
            if (col == 0.0 || row == 0.0) continue;
            double f = 1.0;
            const double total = col + row;
            while (col < row / 2.0) {
                col *= 2.0;
                row /= 2.0;
                f *= 2.0;
            }
            while (col >= row * 2.0) {
                col /= 2.0;
                row *= 2.0;
                f /= 2.0;
            }
            if (col + row < 0.95 * total) {
                changed = true;
                c.row(i) /= f;
                c.col(i) *= f;
            }
        }
    }
}

bool companion(const std::vector<cplx>& a, int d, std::vector<cplx>& z) {
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 1; i < d; ++i) c(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) c(i, d - 1) = -a[i] / a[d];
    balance(c);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(c, false);
    if (solver.info() != Eigen::Success) return false;
    z.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + d);
    return true;
}

// Newton steps until the termwise-relative residual is below tolerance.
bool polish(const std::vector<cplx>& a, int d, std::vector<cplx>& z) {
    for (cplx& root : z) {
        Evaluation e = evaluate(a, d, root);
        for (int step = 0; step < kNewtonMaxSteps && e.residual > kPolishTolerance; ++step) {
            if (!std::isfinite(std::abs(e.newton))) break;
            root -= e.newton;
            e = evaluate(a, d, root);
        }
        if (!(e.residual <= kPolishTolerance)) return false;
    }
    return true;
}

}  // namespace

PolynomialSample sample_su2_polynomial(int N, std::uint64_t seed, std::uint64_t stream) {
    if (N < 1 || N > kMaxPolynomialDegree)
        throw InvalidArgument("degree must lie in [1, " + std::to_string(kMaxPolynomialDegree) + "]");
    CounterRng rng(seed, stream);
    PolynomialSample p{N, std::vector<cplx>(N + 1)};
    const double lgN = std::lgamma(N + 1.0);
    for (int j = 0; j <= N; ++j) {
        const double weight = std::exp(0.5 * (lgN - std::lgamma(j + 1.0) - std::lgamma(N - j + 1.0)));
        p.coeffs[j] = weight * rng.complex_normal();
    }
    return p;
}

int effective_degree(const PolynomialSample& p) {
    if (p.coeffs.size() != static_cast<std::size_t>(p.degree) + 1)
        throw InvalidArgument("coefficient count must equal degree + 1");
    double largest = 0.0;
    for (const cplx& c : p.coeffs) largest = std::max(largest, std::abs(c));
    int d = p.degree;
    while (d > 0 && std::abs(p.coeffs[d]) < 1e-13 * largest) --d;
    return d;
}

std::vector<cplx> polynomial_roots(const PolynomialSample& p, RootMethod method) {
    const int d_full = effective_degree(p);
    // Roots at the origin: strip vanishing low-order coefficients.
    int shift = 0;
    while (shift < d_full && p.coeffs[shift] == 0.0) ++shift;
    std::vector<cplx> a(p.coeffs.begin() + shift, p.coeffs.begin() + d_full + 1);
    const int d = d_full - shift;

    std::vector<cplx> roots;
    if (d == 1) {
        roots = {-a[0] / a[1]};
    } else if (d > 1) {
        // Companion eigenvalues lose the small roots to rounding when the
        // coefficients span many decades, so they only seed the Aberth sweeps.
        bool ok = false;
        if (method == RootMethod::aberth) {
            roots = newton_polygon_start(a, d);
            ok = aberth(a, d, roots) && polish(a, d, roots);
        }
        if (!ok) ok = companion(a, d, roots) && aberth(a, d, roots) && polish(a, d, roots);
        if (!ok) throw RootFindingFailed("Newton polishing did not reach residual 1e-10 (degree " + std::to_string(d) + ")");
    }
    roots.insert(roots.end(), shift, cplx{0.0});
    return roots;
}

double relative_residual(const PolynomialSample& p, cplx z) {
    const int d = effective_degree(p);
    if (d == 0) return p.coeffs[0] == 0.0 ? 0.0 : 1.0;
    std::vector<cplx> a(p.coeffs.begin(), p.coeffs.begin() + d + 1);
    return evaluate(a, d, z).residual;
}

double scaled_fs_distance(int N, cplx z1, cplx z2) {
    return std::sqrt(static_cast<double>(N)) * std::atan2(std::abs(z1 - z2), std::abs(1.0 + std::conj(z1) * z2));
}

double PairHistogram::g_estimate(std::size_t b) const { return static_cast<double>(counts.at(b)) / normalizer.at(b); }

double PairHistogram::std_error(std::size_t b) const {
    if (samples < 2) return std::numeric_limits<double>::infinity();
    const double s = static_cast<double>(samples);
    const double total = static_cast<double>(counts.at(b));
    const double spread = std::max(0.0, count_squares.at(b) - total * total / s);
    return std::sqrt(spread * s / (s - 1.0)) / normalizer.at(b);
}

std::vector<std::uint64_t> count_pairs(const std::vector<cplx>& points, int N, double window,
                                       const std::vector<double>& bin_edges) {
    const std::size_t bins = bin_edges.size() - 1;
    std::vector<std::uint64_t> counts(bins, 0);
    const double scale = std::sqrt(static_cast<double>(N));
    const double r_max = bin_edges.back();
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (scale * std::abs(points[i]) > window) continue;
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (j == i) continue;
            const double r = scaled_fs_distance(N, points[i], points[j]);
            if (r < bin_edges.front() || r >= r_max) continue;
            const auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), r);
            ++counts[static_cast<std::size_t>(it - bin_edges.begin()) - 1];
        }
    }
    return counts;
}

std::vector<double> poisson_normalizer(int N, double window, const std::vector<double>& bin_edges,
                                       std::uint64_t samples) {
    const double n = N;
    const double centers = window * window / (1.0 + window * window / n);
    std::vector<double> out;
    for (std::size_t b = 0; b + 1 < bin_edges.size(); ++b) {
        const double lo = std::sin(bin_edges[b] / std::sqrt(n));
        const double hi = std::sin(bin_edges[b + 1] / std::sqrt(n));
        out.push_back(static_cast<double>(samples) * centers * n * (hi * hi - lo * lo));
    }
    return out;
}

namespace {

void check_config(const PairCorrelationConfig& config) {
    if (config.bin_edges.size() < 2) throw InvalidArgument("need at least two bin edges");
    if (config.bin_edges.front() < 0.0) throw InvalidArgument("bin edges must be >= 0");
    for (std::size_t i = 1; i < config.bin_edges.size(); ++i)
        if (!(config.bin_edges[i] > config.bin_edges[i - 1])) throw InvalidArgument("bin edges must increase");
    if (config.samples < 1) throw InvalidArgument("need at least one sample");
    if (!(config.window > 0.0)) throw InvalidArgument("window must be positive");
    if (config.window > kMaxWindow) throw WindowTooLarge("window radius exceeds 3");
    if (config.bin_edges.back() > config.window) throw WindowTooLarge("largest bin edge exceeds the window radius");
    if (config.N < 2 || config.N > kMaxPolynomialDegree)
        throw InvalidArgument("degree must lie in [2, " + std::to_string(kMaxPolynomialDegree) + "]");
    if (config.N < 25.0 * config.window * config.window)
        throw InsufficientDegree("N must be at least 25 R_w^2 = " + std::to_string(25.0 * config.window * config.window));
}

std::vector<cplx> poisson_sphere_points(int N, std::uint64_t seed, std::uint64_t stream) {
    CounterRng rng(seed, stream);
    const std::uint64_t count = rng.poisson(static_cast<double>(N));
    std::vector<cplx> points;
    points.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const double v = rng.uniform();
        const double phase = 2.0 * std::numbers::pi * rng.uniform();
        points.push_back(std::polar(std::sqrt(v / (1.0 - v)), phase));
    }
    return points;
}

constexpr std::uint64_t kSamplesPerChunk = 16;

}  // namespace

PairHistogram pair_correlation_estimate(const PairCorrelationConfig& config) {
    check_config(config);
    const std::size_t bins = config.bin_edges.size() - 1;
    const std::uint64_t chunks = (config.samples + kSamplesPerChunk - 1) / kSamplesPerChunk;

    struct Partial {
        std::vector<std::uint64_t> counts;
        std::vector<double> squares;
    };
    std::vector<Partial> partial(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        Partial& out = partial[c];
        out.counts.assign(bins, 0);
        out.squares.assign(bins, 0.0);
        const std::uint64_t first = c * kSamplesPerChunk;
        const std::uint64_t last = std::min(config.samples, first + kSamplesPerChunk);
        for (std::uint64_t s = first; s < last; ++s) {
            const std::vector<cplx> points =
                config.source == PointSource::su2_roots
                    ? polynomial_roots(sample_su2_polynomial(config.N, config.seed, s))
                    : poisson_sphere_points(config.N, config.seed, s);
            const auto counts = count_pairs(points, config.N, config.window, config.bin_edges);
            for (std::size_t b = 0; b < bins; ++b) {
                out.counts[b] += counts[b];
                out.squares[b] += static_cast<double>(counts[b]) * static_cast<double>(counts[b]);
            }
        }
    });

    PairHistogram h;
    h.bin_edges = config.bin_edges;
    h.counts.assign(bins, 0);
    h.count_squares.assign(bins, 0.0);
    h.samples = config.samples;
    for (const Partial& p : partial)
        for (std::size_t b = 0; b < bins; ++b) {
            h.counts[b] += p.counts[b];
            h.count_squares[b] += p.squares[b];
        }
    h.normalizer = poisson_normalizer(config.N, config.window, config.bin_edges, config.samples);
    return h;
}

}  // namespace zerocorr
