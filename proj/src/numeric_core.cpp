#include "zerocorr/numeric_core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include "zerocorr/errors.hpp"

namespace zerocorr {

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> init) {
    rows_ = init.size();
    cols_ = rows_ == 0 ? 0 : init.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
        if (row.size() != cols_) throw InvalidArgument("ragged matrix initializer");
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
}

double ComplexMatrix::norm1() const {
    double best = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
        best = std::max(best, s);
    }
    return best;
}

bool ComplexMatrix::is_hermitian(double rel_tol) const {
    if (!square()) return false;
    const double scale = std::max(frobenius_norm(), 1e-300);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i; j < cols_; ++j)
            if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > rel_tol * scale) return false;
    return true;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw InvalidArgument("shape mismatch in +=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw InvalidArgument("shape mismatch in -=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw InvalidArgument("shape mismatch in matrix product");
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t l = 0; l < a.cols(); ++l) {
            const cplx ail = a(i, l);
            if (ail == cplx{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += ail * b(l, j);
        }
    return out;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

ComplexMatrix cholesky(const ComplexMatrix& a) {
    if (!a.square()) throw InvalidArgument("cholesky: matrix not square");
    const std::size_t n = a.rows();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
    const double floor = 1e-14 * max_diag;

    ComplexMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j).real();
        for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
        if (!(d > floor))
            throw NotPositiveDefinite("pivot " + std::to_string(j) + " is " + std::to_string(d));
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            cplx s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / ljj;
        }
    }
    return l;
}

namespace {

// Solves L L* x = b in place given the Cholesky factor.
ComplexMatrix cholesky_substitute(const ComplexMatrix& l, ComplexMatrix b) {
    const std::size_t n = l.rows();
    for (std::size_t c = 0; c < b.cols(); ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            cplx s = b(i, c);
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * b(k, c);
            b(i, c) = s / l(i, i);
        }
        for (std::size_t ii = n; ii-- > 0;) {
            cplx s = b(ii, c);
            for (std::size_t k = ii + 1; k < n; ++k) s -= std::conj(l(k, ii)) * b(k, c);
            b(ii, c) = s / l(ii, ii);
        }
    }
    return b;
}

}  // namespace

double hermitian_rcond(const ComplexMatrix& a) {
    const ComplexMatrix l = cholesky(a);
    const ComplexMatrix inv = cholesky_substitute(l, ComplexMatrix::identity(a.rows()));
    return 1.0 / (a.norm1() * inv.norm1());
}

ComplexMatrix hermitian_solve(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (!a.square()) throw InvalidArgument("hermitian_solve: matrix not square");
    if (b.rows() != a.rows()) throw InvalidArgument("hermitian_solve: rhs row mismatch");
    // Jacobi equilibration: solve (D a D) y = D b, x = D y with D = diag(a_ii^{-1/2}).
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
    const ComplexMatrix l = cholesky(scaled);
    const ComplexMatrix inv = cholesky_substitute(l, ComplexMatrix::identity(n));
    const double rcond = 1.0 / (scaled.norm1() * inv.norm1());
    if (rcond < 1e-12)
        throw NearSingular("reciprocal condition number " + std::to_string(rcond) + " < 1e-12");
    ComplexMatrix rhs = b;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < rhs.cols(); ++j) rhs(i, j) *= d[i];
    ComplexMatrix x = cholesky_substitute(l, std::move(rhs));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) *= d[i];
    return x;
}

cplx determinant(const ComplexMatrix& a) {
    if (!a.square()) throw InvalidArgument("determinant: matrix not square");
    const std::size_t n = a.rows();
    if (n == 0) return 1.0;

    if (a.is_hermitian()) {
        try {
            const ComplexMatrix l = cholesky(a);
            double d = 1.0;
            for (std::size_t i = 0; i < n; ++i) d *= l(i, i).real() * l(i, i).real();
            return d;
        } catch (const NotPositiveDefinite&) {
            // indefinite or singular Hermitian input falls through to LU
        }
    }

    ComplexMatrix lu = a;
    cplx det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
        if (lu(piv, k) == cplx{}) return 0.0;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
            det = -det;
        }
        det *= lu(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const cplx f = lu(i, k) / lu(k, k);
            for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
        }
    }
    return det;
}

cplx permanent(const ComplexMatrix& a) {
    if (!a.square()) throw InvalidArgument("permanent: matrix not square");
    const std::size_t n = a.rows();
    if (n > kMaxPermanentSize)
        throw SizeLimitExceeded("permanent of size " + std::to_string(n) + " > 20");
    if (n == 0) return 1.0;

    // per(A) = (-1)^n sum_S (-1)^|S| prod_i sum_{j in S} a_ij, walking subsets in
    // Gray-code order so each step adds or removes a single column.
    std::vector<cplx> row_sum(n, 0.0);
    cplx total = 0.0;
    const std::uint64_t count = std::uint64_t{1} << n;
    std::uint64_t gray = 0;
    for (std::uint64_t k = 1; k < count; ++k) {
        const auto j = static_cast<std::size_t>(std::countr_zero(k));
        gray ^= std::uint64_t{1} << j;
        const bool added = (gray >> j) & 1U;
        cplx prod = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            row_sum[i] += added ? a(i, j) : -a(i, j);
            prod *= row_sum[i];
        }
        total += (std::popcount(gray) % 2 == 1) ? -prod : prod;
    }
    return (n % 2 == 1) ? -total : total;
}

std::vector<SetPartition> set_partitions(int n) {
    if (n < 1) throw InvalidArgument("set_partitions: n must be >= 1");
    if (n > kMaxPartitionSize)
        throw SizeLimitExceeded("set_partitions of size " + std::to_string(n) + " > 8");

    // Restricted growth strings: label[0] = 0, label[i] <= 1 + max(label[0..i)).
    std::vector<SetPartition> out;
    std::vector<int> label(n, 0);
    std::vector<int> max_prefix(n, 0);
    while (true) {
        int blocks = 0;
        for (int v : label) blocks = std::max(blocks, v + 1);
        SetPartition p(blocks);
        for (int i = 0; i < n; ++i) p[label[i]].push_back(i + 1);
        out.push_back(std::move(p));

        int i = n - 1;
        while (i > 0 && label[i] == max_prefix[i - 1] + 1) --i;
        if (i == 0) break;
        ++label[i];
        max_prefix[i] = std::max(max_prefix[i - 1], label[i]);
        for (int j = i + 1; j < n; ++j) {
            label[j] = 0;
            max_prefix[j] = max_prefix[i];
        }
    }
    return out;
}

}  // namespace zerocorr
