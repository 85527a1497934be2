#include "zerocorr/closed_form.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "zerocorr/errors.hpp"

namespace zerocorr {

namespace {

void check_kappa_query(const KappaQuery& q) {
    if (!(q.r >= 0.0)) throw InvalidArgument("kappa: r must be >= 0");
    if (q.k != 1 && q.k != 2) throw InvalidArgument("kappa: k must be 1 or 2");
    if (q.m < 1) throw InvalidArgument("kappa: m must be >= 1");
    if (q.k > q.m) {
        if (q.k == 2 && q.m == 1) throw DomainError("kappa_{2m} needs m >= 2 (the closed form divides by m-1)");
        throw InvalidArgument("kappa: k must not exceed m");
    }
}

// κ_{1m} with x = e^{-2t}; sinh, cosh and sinh³ are rewritten so that nothing
// overflows for large t.
double kappa1_closed(double r, int m) {
    const double t = 0.5 * r * r;
    if (t == 0.0) return m == 1 ? 0.0 : std::numeric_limits<double>::infinity();
    const double md = m;
    const double x = std::exp(-2.0 * t);
    const double om = -std::expm1(-2.0 * t);
    const double bracket = (md * md + md) * om * om * (1.0 + x) / 16.0 + 0.5 * t * t * x * (1.0 + x) -
                           0.5 * (md + 1.0) * t * x * om;
    return 8.0 * bracket / (md * md * om * om * om) + (md - 1.0) / (2.0 * md);
}

// κ_{2m} with x = e^{-u}, u = r².
double kappa2_closed(double r, int m) {
    const double u = r * r;
    if (u == 0.0) return m == 2 ? 0.75 : std::numeric_limits<double>::infinity();
    const double md = m;
    const double x = std::exp(-u);
    const double om = -std::expm1(-u);
    const double om2 = om * om;
    const double first = ((md * md - md) + 2.0 * (md - 1.0) * x + 2.0 * x * x) / (om2 * md * (md - 1.0));
    const double second = 4.0 * u * x * ((md - 1.0) + x) * (md + 1.0) / (om2 * om * (md - 1.0) * md * md);
    const double third =
        2.0 * u * u * x * ((md - 1.0) + 2.0 * md * x + x * x) / (om2 * om2 * (md - 1.0) * md * md);
    return first - second + third;
}

}  // namespace

Rational make_rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw InvalidArgument("zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    return g > 1 ? Rational{num / g, den / g} : Rational{num, den};
}

double kappa_closed_form(const KappaQuery& q) {
    check_kappa_query(q);
    return q.k == 1 ? kappa1_closed(q.r, q.m) : kappa2_closed(q.r, q.m);
}

double kappa(const KappaQuery& q) {
    check_kappa_query(q);
    if (q.k == 1) {
        if (q.r > 0.0 && 0.5 * q.r * q.r < kKappa1SeriesBelowT) return kappa_series(q);
        return kappa1_closed(q.r, q.m);
    }
    // For m >= 3 the closed form is dominated by ((m-2)/m) r^{-4} and keeps full
    // relative accuracy as r -> 0, whereas the tabulated series stops at r⁶.
    if (q.m == 2 && q.r < kKappa2SeriesBelowR) return kappa_series(q);
    return kappa2_closed(q.r, q.m);
}

std::vector<SeriesTerm> kappa_series_terms(int m, int k) {
    if (m < 1 || k < 1 || k > 2 || k > m) {
        if (k == 2 && m == 1) throw DomainError("kappa_{2m} needs m >= 2");
        throw InvalidArgument("series available for k in {1,2}, k <= m");
    }
    const std::int64_t M = m;
    std::vector<SeriesTerm> terms;
    const auto push = [&](int power, std::int64_t num, std::int64_t den) {
        if (num != 0) terms.push_back({power, make_rational(num, den)});
    };

    if (k == 1) {
        // In t = r²/2: (m-1)/(2m) t^{-1} + (m-1)/(2m) + Σ_i c_i (m+2i)(m+2i-1)/m² t^{2i-1}.
        push(-2, M - 1, M);  // (m-1)/(2m) * 2/r²
        push(0, M - 1, 2 * M);
        constexpr std::array<std::array<std::int64_t, 2>, 7> c{{{1, 6},
                                                                 {-1, 90},
                                                                 {1, 945},
                                                                 {-1, 9450},
                                                                 {1, 93555},
                                                                 {-691, 638512875},
                                                                 {2, 18243225}}};
        for (int i = 1; i <= 7; ++i) {
            const int tpow = 2 * i - 1;
            const std::int64_t num = c[i - 1][0] * (M + 2 * i) * (M + 2 * i - 1);
            const std::int64_t den = c[i - 1][1] * M * M * (std::int64_t{1} << tpow);
            push(2 * tpow, num, den);
        }
        return terms;
    }

    if (m == 2) {
        push(0, 3, 4);
        push(4, 1, 24);
        push(8, -1, 288);
        push(12, 1, 4800);
        push(16, -1, 96768);
        return terms;
    }
    push(-4, M - 2, M);
    push(-2, M - 2, M);
    push(0, 5 * M * M - 7 * M + 12, 12 * (M - 1) * M);
    push(2, (M - 2) * (M + 2) * (M + 1), 12 * (M - 1) * M * M);
    push(4, (M + 3) * (M + 2), 240 * (M - 1) * M);
    push(6, -(M - 2) * (M + 4) * (M + 3), 720 * (M - 1) * M * M);
    return terms;
}

double kappa_series(const KappaQuery& q, int terms) {
    check_kappa_query(q);
    const auto all = kappa_series_terms(q.m, q.k);
    double sum = 0.0;
    int used = 0;
    for (const auto& term : all) {
        if (used++ >= terms) break;
        sum += term.coeff.value() * std::pow(q.r, term.power);
    }
    return sum;
}

double kappa_asymptote(const KappaQuery& q) {
    check_kappa_query(q);
    const double md = q.m;
    const double r2 = q.r * q.r;
    const double decay = std::exp(-r2);
    if (q.k == 1)
        return 1.0 + (r2 * r2 - 2.0 * (md * md + 1.0) * r2 + md * (3.0 * md + 1.0)) * decay / (md * md);
    return 1.0 + 2.0 * (r2 * r2 - 2.0 * (md + 1.0) * r2 + md * (md + 1.0)) * decay / (md * md);
}

double density(const KernelModel& model, int k) {
    validate(model);
    const int m = dimension(model);
    if (k < 1 || k > m) throw InvalidArgument("density: need 1 <= k <= m");
    double falling = 1.0;  // m!/(m-k)!
    for (int i = 0; i < k; ++i) falling *= m - i;
    const int N = level(model);
    const double level_factor = N > 0 ? std::pow(static_cast<double>(N), k) : 1.0;
    return level_factor * falling / std::pow(std::numbers::pi, k);
}

namespace {

constexpr int kMaxConnectedPoints = 5;

std::vector<int> members(Subset s) {
    std::vector<int> out;
    for (int i = 0; s != 0; ++i, s >>= 1)
        if (s & 1U) out.push_back(i);
    return out;
}

// Blocks of each partition of `s`, as bitmasks.
std::vector<std::vector<Subset>> partitions_of(Subset s) {
    const auto elems = members(s);
    std::vector<std::vector<Subset>> out;
    for (const auto& partition : set_partitions(static_cast<int>(elems.size()))) {
        std::vector<Subset> blocks;
        for (const auto& block : partition) {
            Subset mask = 0;
            for (int idx : block) mask |= Subset{1} << elems[idx - 1];
            blocks.push_back(mask);
        }
        out.push_back(std::move(blocks));
    }
    return out;
}

double lookup(const std::map<Subset, double>& values, Subset s) {
    if (auto it = values.find(s); it != values.end()) return it->second;
    if (std::popcount(s) == 1) return 1.0;
    std::string name = "{";
    for (int i : members(s)) name += (name.size() > 1 ? "," : "") + std::to_string(i + 1);
    throw MissingSubset("no value for subset " + name + "}");
}

void check_points(int n) {
    if (n < 1) throw InvalidArgument("need n >= 1");
    if (n > kMaxConnectedPoints) throw SizeLimitExceeded("connected correlations support n <= 5");
}

double connected_for_subset(const std::map<Subset, double>& kvalues, Subset s) {
    double total = 0.0;
    for (const auto& blocks : partitions_of(s)) {
        const auto l = static_cast<int>(blocks.size());
        double weight = (l % 2 == 1) ? 1.0 : -1.0;
        for (int i = 2; i < l; ++i) weight *= i;
        double prod = 1.0;
        for (Subset b : blocks) prod *= lookup(kvalues, b);
        total += weight * prod;
    }
    return total;
}

}  // namespace

double connected_correlation(const std::map<Subset, double>& kvalues, int n) {
    check_points(n);
    return connected_for_subset(kvalues, (Subset{1} << n) - 1);
}

std::map<Subset, double> connected_correlations_all(const std::map<Subset, double>& kvalues, int n) {
    check_points(n);
    std::map<Subset, double> out;
    for (Subset s = 1; s < (Subset{1} << n); ++s) out[s] = connected_for_subset(kvalues, s);
    return out;
}

std::map<Subset, double> correlations_from_connected(const std::map<Subset, double>& tvalues, int n) {
    check_points(n);
    std::map<Subset, double> out;
    for (Subset s = 1; s < (Subset{1} << n); ++s) {
        double total = 0.0;
        for (const auto& blocks : partitions_of(s)) {
            double prod = 1.0;
            for (Subset b : blocks) prod *= lookup(tvalues, b);
            total += prod;
        }
        out[s] = total;
    }
    return out;
}

double decay_bound(const std::vector<Point>& points) {
    const int n = static_cast<int>(points.size());
    if (n > 3) throw SizeLimitExceeded("decay_bound supports n <= 3");
    if (n < 2) throw InvalidArgument("decay_bound needs at least two points");

    std::vector<std::array<int, 2>> pairs;
    std::vector<double> factor;
    for (int i = 0; i < n; ++i)
        for (int f = i + 1; f < n; ++f) {
            if (points[i].size() != points[f].size()) throw InvalidArgument("decay_bound: dimension mismatch");
            double d2 = 0.0;
            for (std::size_t q = 0; q < points[i].size(); ++q) d2 += std::norm(points[i][q] - points[f][q]);
            if (d2 < 0.25) throw InvalidArgument("decay_bound needs pairwise distances >= 0.5");
            pairs.push_back({i, f});
            factor.push_back(d2 * std::exp(-0.5 * d2));
        }

    // Enumerate edge multiplicities on every pair, total at most 2n.
    const int max_edges = 2 * n;
    const auto e = static_cast<int>(pairs.size());
    std::vector<int> mult(e, 0);
    double best = 0.0;
    while (true) {
        int total = 0;
        for (int v : mult) total += v;
        if (total <= max_edges) {
            std::vector<int> degree(n, 0);
            Subset reached = 1;  // vertex 0
            for (int pass = 0; pass < n; ++pass)
                for (int i = 0; i < e; ++i)
                    if (mult[i] > 0) {
                        const Subset a = Subset{1} << pairs[i][0];
                        const Subset b = Subset{1} << pairs[i][1];
                        if (reached & (a | b)) reached |= a | b;
                    }
            for (int i = 0; i < e; ++i) {
                degree[pairs[i][0]] += mult[i];
                degree[pairs[i][1]] += mult[i];
            }
            const bool connected = reached == (Subset{1} << n) - 1;
            bool degrees_ok = true;
            for (int d : degree) degrees_ok = degrees_ok && d >= 2;
            if (connected && degrees_ok) {
                double prod = 1.0;
                for (int i = 0; i < e; ++i) prod *= std::pow(factor[i], mult[i]);
                best = std::max(best, prod);
            }
        }
        int pos = 0;
        while (pos < e && ++mult[pos] > max_edges) mult[pos++] = 0;
        if (pos == e) break;
    }
    return best;
}

}  // namespace zerocorr
