#include <doctest.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"
#include "zerocorr/closed_form.hpp"
#include "zerocorr/errors.hpp"
#include "zerocorr/kac_rice.hpp"

using namespace zerocorr;
using zerocorr::testing::random_point;

namespace {

const double kPi = std::numbers::pi;

Point on_axis(int m, double r) {
    Point p(m, 0.0);
    p[0] = r;
    return p;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
    return d;
}

// Random unitary by Gram-Schmidt on a random complex matrix.
ComplexMatrix random_unitary(int m, CounterRng& rng) {
    ComplexMatrix u(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) u(i, j) = rng.complex_normal();
    for (int c = 0; c < m; ++c) {
        for (int prev = 0; prev < c; ++prev) {
            cplx dot = 0.0;
            for (int i = 0; i < m; ++i) dot += std::conj(u(i, prev)) * u(i, c);
            for (int i = 0; i < m; ++i) u(i, c) -= dot * u(i, prev);
        }
        double norm = 0.0;
        for (int i = 0; i < m; ++i) norm += std::norm(u(i, c));
        for (int i = 0; i < m; ++i) u(i, c) /= std::sqrt(norm);
    }
    return u;
}

double normalized(const KernelModel& model, int k, const std::vector<Point>& points) {
    return normalized_correlation({model, k, points, ExactMethod{}}).value;
}

}  // namespace

TEST_CASE("two-point limit blocks") {
    const double r = 0.8;
    const double u = r * r;
    for (int m = 1; m <= 3; ++m) {
        const CovarianceBlocks blk = assemble_blocks({HeisenbergLimit{m}, 1, {Point(m, 0.0), on_axis(m, r)}, ExactMethod{}});
        CHECK(max_abs_diff(blk.a, ComplexMatrix{{1.0, 1.0}, {1.0, std::exp(u)}}) < 1e-14);
        for (int p = 0; p < 2; ++p)
            for (int pp = 0; pp < 2; ++pp)
                for (int q = 0; q < m; ++q) {
                    const double want = (q == 0 && p == 1) ? r * (pp == 1 ? std::exp(u) : 1.0) : 0.0;
                    CHECK(std::abs(blk.b(p, pp * m + q) - want) < 1e-14);
                }
        const ComplexMatrix c1{{1.0, 1.0}, {1.0, (1.0 + u) * std::exp(u)}};
        const ComplexMatrix rest{{1.0, 1.0}, {1.0, std::exp(u)}};
        const ComplexMatrix lambda = reduced_jet_covariance(blk);
        const double den = std::expm1(u);
        const ComplexMatrix lambda1{{(std::exp(u) - 1 - u) / den, (std::exp(u) - 1 - u * std::exp(u)) / den},
                                    {(std::exp(u) - 1 - u * std::exp(u)) / den,
                                     (std::exp(2 * u) - std::exp(u) - u * std::exp(u)) / den}};
        for (int q = 0; q < m; ++q)
            for (int qp = 0; qp < m; ++qp)
                for (int p = 0; p < 2; ++p)
                    for (int pp = 0; pp < 2; ++pp) {
                        const cplx c = blk.c(p * m + q, pp * m + qp);
                        const cplx l = lambda(p * m + q, pp * m + qp);
                        if (q != qp) {
                            CHECK(std::abs(c) < 1e-14);
                            CHECK(std::abs(l) < 1e-13);
                        } else if (q == 0) {
                            CHECK(std::abs(c - c1(p, pp)) < 1e-13);
                            CHECK(std::abs(l - lambda1(p, pp)) < 1e-13);
                        } else {
                            CHECK(std::abs(c - rest(p, pp)) < 1e-13);
                            CHECK(std::abs(l - rest(p, pp)) < 1e-13);
                        }
                    }
    }
}

TEST_CASE("one-point blocks") {
    const Point z{cplx(0.3, -0.4), cplx(0.1, 0.2)};
    const double rho = 1.0 + std::norm(z[0]) + std::norm(z[1]);

    const CovarianceBlocks lim = assemble_blocks({HeisenbergLimit{2}, 2, {z}, ExactMethod{}});
    CHECK(std::abs(lim.a(0, 0) - std::exp(rho - 1.0)) < 1e-14);
    const ComplexMatrix full = jet_covariance(lim);
    REQUIRE(full.rows() == 4);
    CHECK(max_abs_diff(full, std::exp(rho - 1.0) * ComplexMatrix::identity(4)) < 1e-13);

    const int N = 7;
    const CovarianceBlocks fs = assemble_blocks({FubiniStudy{N, 2}, 1, {z}, ExactMethod{}});
    CHECK(std::abs(fs.a(0, 0) - std::pow(rho, N)) < 1e-12);
    for (int q = 0; q < 2; ++q) CHECK(std::abs(fs.b(0, q) - double(N) * z[q] * std::pow(rho, N - 1)) < 1e-12);
    const ComplexMatrix lambda = reduced_jet_covariance(fs);
    for (int q = 0; q < 2; ++q)
        for (int qp = 0; qp < 2; ++qp) {
            const cplx want = double(N) * ((q == qp ? rho : 0.0) - std::conj(z[q]) * z[qp]) * std::pow(rho, N - 2);
            CHECK(std::abs(lambda(q, qp) - want) < 1e-12);
        }
}

TEST_CASE("one-point densities") {
    CounterRng rng(1, 2);
    for (int N : {3, 20})
        for (int trial = 0; trial < 5; ++trial) {
            const Point z = random_point(1, 2.0, rng);
            CHECK(correlation({FubiniStudy{N, 1}, 1, {z}, ExactMethod{}}).value == doctest::Approx(N / kPi).epsilon(1e-12));
        }
    for (int m = 1; m <= 4; ++m)
        for (int k = 1; k <= m; ++k) {
            double falling = 1;
            for (int i = 0; i < k; ++i) falling *= m - i;
            const double fs = correlation({FubiniStudy{9, m}, k, {Point(m, 0.0)}, ExactMethod{}}).value;
            CHECK(fs == doctest::Approx(std::pow(9.0, k) * falling / std::pow(kPi, k)).epsilon(1e-12));
            CHECK(normalized(HeisenbergLimit{m}, k, {random_point(m, 1.0, rng)}) == doctest::Approx(1.0).epsilon(1e-12));
        }
}

TEST_CASE("two-point limit correlations match kappa") {
    const double raw = correlation({HeisenbergLimit{1}, 1, {{0.0}, {1.0}}, ExactMethod{}}).value;
    CHECK(raw == doctest::Approx(kappa({1.0, 1, 1}) / (kPi * kPi)).epsilon(1e-12));
    for (int m = 1; m <= 3; ++m)
        for (double r : {0.3, 1.5, 2.5})
            CHECK(normalized(HeisenbergLimit{m}, 1, {Point(m, 0.0), on_axis(m, r)}) ==
                  doctest::Approx(kappa({r, m, 1})).epsilon(1e-10));
}

TEST_CASE("kappa_22 repulsion limit") {
    // Λ loses about four digits to cancellation at r = 1e-3, so the limit is
    // checked at a tolerance that reflects that.
    CHECK(normalized(HeisenbergLimit{2}, 2, {Point(2, 0.0), on_axis(2, 1e-3)}) == doctest::Approx(0.75).epsilon(1e-2));
    CHECK(normalized(HeisenbergLimit{2}, 2, {Point(2, 0.0), on_axis(2, 0.05)}) ==
          doctest::Approx(kappa({0.05, 2, 2})).epsilon(1e-6));
}

TEST_CASE("rigid motions leave the limit correlations unchanged") {
    CounterRng rng(11, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 2;
        std::vector<Point> three{random_point(m, 1.0, rng), random_point(m, 1.0, rng), random_point(m, 1.0, rng)};
        std::vector<Point> two{three[0], three[1]};
        const ComplexMatrix u = random_unitary(m, rng);
        const Point shift = random_point(m, 2.0, rng);
        const auto move = [&](std::vector<Point> pts) {
            for (auto& p : pts) {
                Point q(m, 0.0);
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) q[i] += u(i, j) * p[j];
                for (int i = 0; i < m; ++i) p[i] = q[i] + shift[i];
            }
            return pts;
        };
        CHECK(normalized(HeisenbergLimit{m}, 1, move(three)) ==
              doctest::Approx(normalized(HeisenbergLimit{m}, 1, three)).epsilon(1e-10));
        CHECK(normalized(HeisenbergLimit{m}, 2, move(two)) ==
              doctest::Approx(normalized(HeisenbergLimit{m}, 2, two)).epsilon(1e-10));
    }
}

TEST_CASE("point order does not matter") {
    CounterRng rng(12, 0);
    const std::vector<Point> pts{random_point(2, 1.0, rng), random_point(2, 1.0, rng), random_point(2, 1.0, rng)};
    const double base = correlation({FubiniStudy{5, 2}, 1, pts, ExactMethod{}}).value;
    CHECK(base > 0.0);
    const std::vector<Point> swapped{pts[2], pts[0], pts[1]};
    CHECK(correlation({FubiniStudy{5, 2}, 1, swapped, ExactMethod{}}).value == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("correlations are positive") {
    CounterRng rng(13, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 1 + trial % 3;
        const int k = 1 + trial % m;
        const int n = k == 1 ? 3 : (k == 2 ? 2 : 1);
        std::vector<Point> pts;
        for (int p = 0; p < n; ++p) pts.push_back(random_point(m, 1.0, rng));
        for (const KernelModel& model : {KernelModel{HeisenbergLimit{m}}, KernelModel{FubiniStudy{4, m}}})
            CHECK(correlation({model, k, pts, ExactMethod{}}).value > 0.0);
    }
}

TEST_CASE("left and right Heisenberg frames agree") {
    CounterRng rng(14, 0);
    for (int trial = 0; trial < 6; ++trial) {
        const int m = 1 + trial % 2;
        const int k = 1 + (trial / 2) % m;
        std::vector<Point> pts{random_point(m, 0.6, rng), random_point(m, 0.6, rng)};
        const double right = normalized(HeisenbergLevel{3, m, DerivativeFrame::right_invariant}, k, pts);
        const double left = normalized(HeisenbergLevel{3, m, DerivativeFrame::left_invariant}, k, pts);
        CHECK(right == doctest::Approx(left).epsilon(1e-10));
    }
}

TEST_CASE("the Heisenberg level is an exact rescaling of the limit") {
    for (int N : {1, 4, 25})
        for (int m = 1; m <= 2; ++m) {
            const double r = 1.3;
            const double level_value =
                normalized(HeisenbergLevel{N, m}, 1, {Point(m, 0.0), on_axis(m, r / std::sqrt(double(N)))});
            CHECK(level_value == doctest::Approx(kappa({r, m, 1})).epsilon(1e-10));
        }
}

namespace {

double universality_exponent(int m, double r) {
    const double limit = correlation({HeisenbergLimit{m}, 1, {Point(m, 0.0), on_axis(m, r)}, ExactMethod{}}).value;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double N : {64.0, 256.0, 1024.0, 4096.0}) {
        const double raw = correlation({FubiniStudy{int(N), m}, 1, {Point(m, 0.0), on_axis(m, r / std::sqrt(N))}, ExactMethod{}}).value;
        const double x = std::log(N), y = std::log(std::abs(raw / (N * N) - limit));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return -(4 * sxy - sx * sy) / (4 * sxx - sx * sx);
}

}  // namespace

TEST_CASE("Fubini-Study correlations approach the limit") {
    for (auto [m, r] : {std::pair{1, 0.5}, {1, 1.0}, {2, 0.5}, {2, 1.0}, {2, 2.0}})
        CHECK(universality_exponent(m, r) >= 0.45);
}

// Known gap: at m = 1, r = 2 the 1/N and 1/N² terms of the deviation cancel
// near N = 64, so the log-log fit over this grid is meaningless there.
TEST_CASE("Fubini-Study correlations approach the limit at m=1, r=2" * doctest::should_fail()) {
    CHECK(universality_exponent(1, 2.0) >= 0.45);
}

TEST_CASE("exact and Monte Carlo correlations agree") {
    CorrelationQuery q{HeisenbergLimit{2}, 1, {Point(2, 0.0), on_axis(2, 0.9)}, MonteCarloMethod{400'000, 3}};
    const Estimate mc = correlation(q);
    q.method = ExactMethod{};
    const double exact = correlation(q).value;
    CHECK(std::abs(mc.value - exact) <= 4.0 * mc.std_error);
}

TEST_CASE("query validation") {
    CHECK_THROWS_AS(correlation({HeisenbergLimit{1}, 1, {{0.0}, {1e-4}}, ExactMethod{}}), NearSingular);
    CHECK_THROWS_AS(correlation({FubiniStudy{100, 1}, 1, {{0.0}, {5e-5}}, ExactMethod{}}), NearSingular);
    CHECK_NOTHROW(correlation({FubiniStudy{100, 1}, 1, {{0.0}, {2e-4}}, ExactMethod{}}));
    CHECK_THROWS_AS(correlation({HeisenbergLimit{1}, 1, {{0.0}, {1.0}, {2.0}, {3.0}}, ExactMethod{}}), SizeLimitExceeded);
    CHECK_THROWS_AS(correlation({HeisenbergLimit{2}, 2, {Point(2, 0.0), on_axis(2, 1), on_axis(2, 2)}, ExactMethod{}}),
                    SizeLimitExceeded);
    CHECK_THROWS_AS(correlation({HeisenbergLimit{1}, 2, {{0.0}}, ExactMethod{}}), InvalidArgument);
    CHECK_THROWS_AS(correlation({HeisenbergLimit{2}, 1, {{0.0}}, ExactMethod{}}), InvalidArgument);
}
