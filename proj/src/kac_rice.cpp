#include "zerocorr/kac_rice.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "zerocorr/closed_form.hpp"
#include "zerocorr/errors.hpp"

namespace zerocorr {

void validate(const CorrelationQuery& query) {
    validate(query.model);
    const int m = dimension(query.model);
    const int n = query.n();
    if (query.k < 1 || query.k > m)
        throw InvalidArgument("codimension k=" + std::to_string(query.k) + " outside [1, m=" + std::to_string(m) + "]");
    if (n < 1) throw InvalidArgument("need at least one point");
    for (const auto& p : query.points)
        if (static_cast<int>(p.size()) != m) throw InvalidArgument("point dimension differs from m");

    if (std::holds_alternative<ExactMethod>(query.method)) {
        const int max_n = query.k == 1 ? 3 : (query.k == 2 ? 2 : 1);
        if (n > max_n)
            throw SizeLimitExceeded("exact evaluation supports n <= " + std::to_string(max_n) +
                                    " for k=" + std::to_string(query.k));
    }

    const int N = level(query.model);
    const double scale = N > 0 ? std::sqrt(static_cast<double>(N)) : 1.0;
    for (int p = 0; p < n; ++p)
        for (int pp = p + 1; pp < n; ++pp) {
            double d2 = 0.0;
            for (int q = 0; q < m; ++q) d2 += std::norm(query.points[p][q] - query.points[pp][q]);
            const double separation = std::sqrt(d2) * scale;
            if (separation < kMinScaledSeparation)
                throw NearSingular("points " + std::to_string(p + 1) + " and " + std::to_string(pp + 1) +
                                   " have scaled separation " + std::to_string(separation) + " < 1e-3");
        }
}

CovarianceBlocks assemble_blocks(const CorrelationQuery& query) {
    validate(query);
    const int n = query.n();
    const int m = dimension(query.model);
    CovarianceBlocks blocks{ComplexMatrix(n, n), ComplexMatrix(n, n * m), ComplexMatrix(n * m, n * m), query.k};
    for (int p = 0; p < n; ++p)
        for (int pp = 0; pp < n; ++pp) {
            const KernelJet jet = kernel_jet(query.model, query.points[p], query.points[pp]);
            blocks.a(p, pp) = jet.s;
            for (int qp = 0; qp < m; ++qp) blocks.b(p, pp * m + qp) = jet.grad[qp];
            for (int q = 0; q < m; ++q)
                for (int qp = 0; qp < m; ++qp) blocks.c(p * m + q, pp * m + qp) = jet.hess(q, qp);
        }
    return blocks;
}

ComplexMatrix reduced_jet_covariance(const CovarianceBlocks& blocks) {
    const ComplexMatrix solved = hermitian_solve(blocks.a, blocks.b);
    ComplexMatrix lambda = blocks.c - blocks.b.adjoint() * solved;

    const ComplexMatrix lambda_adj = lambda.adjoint();
    const double asym = (lambda - lambda_adj).frobenius_norm();
    const double scale = std::max(lambda.frobenius_norm(), blocks.c.frobenius_norm());
    if (asym > 1e-10 * scale)
        throw NearSingular("conditional covariance lost Hermitian symmetry (relative asymmetry " +
                           std::to_string(asym / scale) + ")");
    lambda += lambda_adj;
    lambda *= 0.5;
    return lambda;
}

namespace {

ComplexMatrix expand_sections(const ComplexMatrix& reduced, int n, int k, int m) {
    ComplexMatrix full(n * k * m, n * k * m);
    for (int p = 0; p < n; ++p)
        for (int pp = 0; pp < n; ++pp)
            for (int j = 0; j < k; ++j)
                for (int q = 0; q < m; ++q)
                    for (int qp = 0; qp < m; ++qp)
                        full(jet_index(p, j, q, k, m), jet_index(pp, j, qp, k, m)) = reduced(p * m + q, pp * m + qp);
    return full;
}

// λ -> L* λ L with L = blockdiag(chol(g(z^p)^{-1})), so that ⟨∏ det(a γ a*)⟩ under λ
// equals ⟨∏ det(a a*)⟩ under the contracted covariance.
ComplexMatrix contract_fs_metric(const ComplexMatrix& reduced, const std::vector<Point>& points, int m) {
    const int n = static_cast<int>(points.size());
    ComplexMatrix lift(n * m, n * m);
    for (int p = 0; p < n; ++p) {
        const ComplexMatrix g = fs_metric(points[p]);
        ComplexMatrix gamma = hermitian_solve(g, ComplexMatrix::identity(m));
        gamma += gamma.adjoint();
        gamma *= 0.5;
        const ComplexMatrix factor = cholesky(gamma);
        for (int q = 0; q < m; ++q)
            for (int r = 0; r < m; ++r) lift(p * m + q, p * m + r) = factor(q, r);
    }
    ComplexMatrix out = lift.adjoint() * reduced * lift;
    out += out.adjoint();
    out *= 0.5;
    return out;
}

}  // namespace

ComplexMatrix jet_covariance(const CovarianceBlocks& blocks) {
    const int n = static_cast<int>(blocks.a.rows());
    const int m = static_cast<int>(blocks.c.rows()) / n;
    return expand_sections(reduced_jet_covariance(blocks), n, blocks.k, m);
}

Estimate correlation(const CorrelationQuery& query) {
    const CovarianceBlocks blocks = assemble_blocks(query);
    const int n = query.n();
    const int k = query.k;
    const int m = dimension(query.model);

    ComplexMatrix reduced = reduced_jet_covariance(blocks);
    if (std::holds_alternative<FubiniStudy>(query.model)) reduced = contract_fs_metric(reduced, query.points, m);
    const ComplexMatrix lambda = expand_sections(reduced, n, k, m);

    const Estimate expectation = expectation_det_product(lambda, n, k, m, query.method);
    const double det_a = determinant(blocks.a).real();
    const double denom = std::pow(std::numbers::pi, k * n) * std::pow(det_a, k);
    return {expectation.value / denom, expectation.std_error / denom};
}

Estimate normalized_correlation(const CorrelationQuery& query) {
    const Estimate raw = correlation(query);
    const double norm = std::pow(density(query.model, query.k), query.n());
    return {raw.value / norm, raw.std_error / norm};
}

}  // namespace zerocorr
