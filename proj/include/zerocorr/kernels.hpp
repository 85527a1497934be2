#pragma once

#include <string>
#include <variant>
#include <vector>

#include "zerocorr/numeric_core.hpp"

namespace zerocorr {

using Point = std::vector<cplx>;

inline constexpr int kMaxDimension = 4;

/// SU(m+1) polynomials of degree N in the affine chart, S_N(z,w) = (1 + z.w̄)^N.
struct FubiniStudy {
    int N = 1;
    int m = 1;
};

/// Which horizontal vector fields differentiate the Heisenberg kernel.
enum class DerivativeFrame { right_invariant, left_invariant };

/// Level-N Heisenberg Szegő kernel on the θ = φ = 0 slice of the circle bundle.
struct HeisenbergLevel {
    int N = 1;
    int m = 1;
    DerivativeFrame frame = DerivativeFrame::right_invariant;
};

/// Bargmann-Fock scaling limit, S(z,w) = exp(z.w̄).
struct HeisenbergLimit {
    int m = 1;
};

using KernelModel = std::variant<FubiniStudy, HeisenbergLevel, HeisenbergLimit>;

int dimension(const KernelModel& model);
/// N for the finite-level models, 0 for the limit.
int level(const KernelModel& model);
std::string describe(const KernelModel& model);
/// Throws InvalidArgument unless 1 <= m <= 4 and N >= 1.
void validate(const KernelModel& model);

/// Kernel value and derivatives at a point pair:
///   s         = S(z, w)
///   grad[q']  = W̄_{q'} S(z, w)            (conjugated derivative in the second slot)
///   hess(q,q')= Z_q W̄_{q'} S(z, w)
/// For the holomorphic-frame models Z = ∂/∂z and W̄ = ∂/∂w̄; for HeisenbergLevel
/// they are the chosen horizontal fields.
struct KernelJet {
    cplx s;
    std::vector<cplx> grad;
    ComplexMatrix hess;
};

KernelJet kernel_jet(const KernelModel& model, const Point& z, const Point& w);

/// N^{-m} Π_N(u/√N, 0; v/√N, 0) for the Fubini-Study circle bundle over CP^m.
cplx fs_scaled_szego(int N, int m, const Point& u, const Point& v);

/// π^{-m} e^{i(θ-φ)} e^{i Im(u.v̄)} e^{-|u-v|²/2}.
cplx heisenberg_limit_kernel(const Point& u, double theta, const Point& v, double phi);

/// Fubini-Study metric tensor g_{qq'}(z) = ((1+|z|²)δ_{qq'} - z̄_q z_{q'}) / (1+|z|²)².
ComplexMatrix fs_metric(const Point& z);

/// z.w̄ = Σ z_r conj(w_r).
cplx hermitian_dot(const Point& z, const Point& w);

}  // namespace zerocorr
