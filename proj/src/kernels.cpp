#include "zerocorr/kernels.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "zerocorr/errors.hpp"

namespace zerocorr {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

cplx ipow(cplx base, int e) {
    cplx result = 1.0;
    while (e > 0) {
        if (e & 1) result *= base;
        base *= base;
        e >>= 1;
    }
    return result;
}

double norm2(const Point& z) {
    double s = 0.0;
    for (const auto& v : z) s += std::norm(v);
    return s;
}

// log(1 + w) without cancellation for small |w|.
cplx log1p_complex(cplx w) {
    const double re = 0.5 * std::log1p(2.0 * w.real() + std::norm(w));
    const double im = std::atan2(w.imag(), 1.0 + w.real());
    return {re, im};
}

void check_point(const Point& p, int m, const char* name) {
    if (static_cast<int>(p.size()) != m)
        throw InvalidArgument(std::string(name) + " has dimension " + std::to_string(p.size()) +
                              ", expected " + std::to_string(m));
}

KernelJet fubini_study_jet(const FubiniStudy& fs, const Point& z, const Point& w) {
    const int N = fs.N;
    const std::size_t m = z.size();
    const cplx base = 1.0 + hermitian_dot(z, w);
    const cplx pow1 = ipow(base, N - 1);
    const cplx pow2 = N >= 2 ? ipow(base, N - 2) : cplx{};

    KernelJet jet{pow1 * base, std::vector<cplx>(m), ComplexMatrix(m, m)};
    for (std::size_t qp = 0; qp < m; ++qp) jet.grad[qp] = static_cast<double>(N) * z[qp] * pow1;
    for (std::size_t q = 0; q < m; ++q)
        for (std::size_t qp = 0; qp < m; ++qp) {
            cplx v = static_cast<double>(N) * (N - 1.0) * std::conj(w[q]) * z[qp] * pow2;
            if (q == qp) v += static_cast<double>(N) * pow1;
            jet.hess(q, qp) = v;
        }
    return jet;
}

KernelJet heisenberg_limit_jet(const Point& z, const Point& w) {
    const std::size_t m = z.size();
    const cplx e = std::exp(hermitian_dot(z, w));
    KernelJet jet{e, std::vector<cplx>(m), ComplexMatrix(m, m)};
    for (std::size_t qp = 0; qp < m; ++qp) jet.grad[qp] = z[qp] * e;
    for (std::size_t q = 0; q < m; ++q)
        for (std::size_t qp = 0; qp < m; ++qp)
            jet.hess(q, qp) = ((q == qp ? 1.0 : 0.0) + std::conj(w[q]) * z[qp]) * e;
    return jet;
}

KernelJet heisenberg_level_jet(const HeisenbergLevel& h, const Point& z, const Point& w) {
    const std::size_t m = z.size();
    const double n = h.N;
    const double log_norm = static_cast<double>(m) * (std::log(n) - std::log(std::numbers::pi));
    const cplx s = std::exp(log_norm + n * hermitian_dot(z, w) - 0.5 * n * norm2(z) - 0.5 * n * norm2(w));

    KernelJet jet{s, std::vector<cplx>(m), ComplexMatrix(m, m)};
    const bool right = h.frame == DerivativeFrame::right_invariant;
    for (std::size_t qp = 0; qp < m; ++qp) {
        const cplx factor = right ? z[qp] : z[qp] - w[qp];
        jet.grad[qp] = n * factor * s;
    }
    for (std::size_t q = 0; q < m; ++q)
        for (std::size_t qp = 0; qp < m; ++qp) {
            const cplx cross = right ? std::conj(w[q]) * z[qp]
                                     : (z[qp] - w[qp]) * (std::conj(w[q]) - std::conj(z[q]));
            jet.hess(q, qp) = ((q == qp ? n : 0.0) + n * n * cross) * s;
        }
    return jet;
}

}  // namespace

cplx hermitian_dot(const Point& z, const Point& w) {
    cplx s = 0.0;
    for (std::size_t r = 0; r < z.size(); ++r) s += z[r] * std::conj(w[r]);
    return s;
}

int dimension(const KernelModel& model) {
    return std::visit([](const auto& m) { return m.m; }, model);
}

int level(const KernelModel& model) {
    return std::visit(overloaded{[](const FubiniStudy& f) { return f.N; },
                                 [](const HeisenbergLevel& h) { return h.N; },
                                 [](const HeisenbergLimit&) { return 0; }},
                      model);
}

std::string describe(const KernelModel& model) {
    std::ostringstream os;
    std::visit(overloaded{[&](const FubiniStudy& f) { os << "fs(N=" << f.N << ",m=" << f.m << ")"; },
                          [&](const HeisenbergLevel& h) {
                              os << "heisenberg-level(N=" << h.N << ",m=" << h.m << ","
                                 << (h.frame == DerivativeFrame::right_invariant ? "right" : "left") << ")";
                          },
                          [&](const HeisenbergLimit& h) { os << "heisenberg-limit(m=" << h.m << ")"; }},
               model);
    return os.str();
}

void validate(const KernelModel& model) {
    const int m = dimension(model);
    if (m < 1 || m > kMaxDimension)
        throw InvalidArgument("dimension m=" + std::to_string(m) + " outside [1, 4]");
    if (!std::holds_alternative<HeisenbergLimit>(model) && level(model) < 1)
        throw InvalidArgument("level N must be >= 1");
}

KernelJet kernel_jet(const KernelModel& model, const Point& z, const Point& w) {
    validate(model);
    const int m = dimension(model);
    check_point(z, m, "z");
    check_point(w, m, "w");
    return std::visit(overloaded{[&](const FubiniStudy& f) { return fubini_study_jet(f, z, w); },
                                 [&](const HeisenbergLevel& h) { return heisenberg_level_jet(h, z, w); },
                                 [&](const HeisenbergLimit&) { return heisenberg_limit_jet(z, w); }},
                      model);
}

cplx fs_scaled_szego(int N, int m, const Point& u, const Point& v) {
    if (N < 1) throw InvalidArgument("fs_scaled_szego: N must be >= 1");
    check_point(u, m, "u");
    check_point(v, m, "v");
    const double n = N;
    // (N+m)!/N! through log-gamma so N ~ 1e4 cannot overflow.
    const double log_prefactor = std::lgamma(n + m + 1.0) - std::lgamma(n + 1.0) - m * std::log(n) -
                                 m * std::log(std::numbers::pi);
    const cplx log_kernel = n * log1p_complex(hermitian_dot(u, v) / n) - 0.5 * n * std::log1p(norm2(u) / n) -
                            0.5 * n * std::log1p(norm2(v) / n);
    return std::exp(log_prefactor + log_kernel);
}

cplx heisenberg_limit_kernel(const Point& u, double theta, const Point& v, double phi) {
    if (u.size() != v.size()) throw InvalidArgument("heisenberg_limit_kernel: dimension mismatch");
    const auto m = static_cast<double>(u.size());
    double dist2 = 0.0;
    for (std::size_t r = 0; r < u.size(); ++r) dist2 += std::norm(u[r] - v[r]);
    const double phase = theta - phi + hermitian_dot(u, v).imag();
    return std::pow(std::numbers::pi, -m) * std::exp(-0.5 * dist2) * std::polar(1.0, phase);
}

ComplexMatrix fs_metric(const Point& z) {
    const std::size_t m = z.size();
    const double rho = 1.0 + norm2(z);
    ComplexMatrix g(m, m);
    for (std::size_t q = 0; q < m; ++q)
        for (std::size_t qp = 0; qp < m; ++qp)
            g(q, qp) = ((q == qp ? rho : 0.0) - std::conj(z[q]) * z[qp]) / (rho * rho);
    return g;
}

}  // namespace zerocorr
