#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace zerocorr {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols, cplx fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> init);

    static ComplexMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<cplx>& entries() const noexcept { return data_; }

    ComplexMatrix adjoint() const;
    double frobenius_norm() const;
    /// Max column sum of absolute values.
    double norm1() const;
    bool is_hermitian(double rel_tol = 1e-12) const;

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(cplx s);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);

/// Lower-triangular L with L L* = a and real positive diagonal.
/// Throws NotPositiveDefinite when a pivot drops below 1e-14 * max |a_ii|.
ComplexMatrix cholesky(const ComplexMatrix& a);

/// Solves a x = b for Hermitian positive-definite a.
/// Throws NearSingular when the reciprocal 1-norm condition number of the
/// diagonally equilibrated matrix is below 1e-12.
ComplexMatrix hermitian_solve(const ComplexMatrix& a, const ComplexMatrix& b);

/// Reciprocal 1-norm condition number of a Hermitian PD matrix.
double hermitian_rcond(const ComplexMatrix& a);

cplx determinant(const ComplexMatrix& a);

inline constexpr std::size_t kMaxPermanentSize = 20;

/// Ryser's formula with Gray-code row-sum updates, O(2^n n).
cplx permanent(const ComplexMatrix& a);

using Block = std::vector<int>;
using SetPartition = std::vector<Block>;

inline constexpr int kMaxPartitionSize = 8;

/// All set partitions of {1..n}; blocks are sorted, and blocks are ordered by
/// their smallest element.
std::vector<SetPartition> set_partitions(int n);

}  // namespace zerocorr
