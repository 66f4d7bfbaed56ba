// Wishart characteristic function and Fourier-Laplace transform.
//
// Four evaluation routes for Phi_alpha(v) = E[exp(i tr(v xi))] and its
// extension E[exp(-tr((u - iv) xi))] on the strip D = {u - iv : u > -I/2}:
//
//   naive_cf       exp(-alpha Log det(I - 2iv)) with the principal branch.
//                  This is the formula the multivariate-statistics literature
//                  quotes; it picks the wrong branch for m >= 3 on part of
//                  Fourier space and is kept as the comparison baseline.
//   cf_quadrature  exp(-alpha * Integral), Integral the adaptive quadrature
//                  of t |-> tr((I + 2t(u-iv))^{-1} (2u - 2iv)) on [0, 1].
//                  This is the analytic continuation and is correct on all
//                  of D.
//   cf_spectral    per-eigenvalue principal logs. For u = 0 each pencil
//                  factor 1 - 2i*lambda stays in the right half-plane, so
//                  the per-factor principal branch is exact; commuting
//                  (u, v) reduce the same way, anything else falls back to
//                  quadrature.
//   cf_path        continuous-argument tracking of t |-> det(I - 2t i v)
//                  along [0, 1], the direct analytic-continuation picture.
//
// The orientation convention, fixed once: phi(1, u - iv) = alpha * Integral
// and every method returns exp(-phi). With u = 0 this reproduces
// exp(+alpha Int tr((I - 2tiv)^{-1}(2iv)) dt), which is pinned by the m = 1
// Gamma characteristic function (1 - 2iv)^{-alpha}.
//
// Each tracking method also reports a winding number: how many 2*pi sheets
// the continuously accumulated argument of the endpoint determinant differs
// from its principal argument. The naive method reports 0 by definition.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "wishart/gindikin.hpp"
#include "wishart/linalg.hpp"
#include "wishart/quadrature.hpp"

namespace wishart {

inline constexpr double kDefaultQuadTol = 1e-11;
inline constexpr int kMaxPathSteps = 1 << 20;

struct StripViolationError : std::domain_error {
    using std::domain_error::domain_error;
};
struct PathBudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct WindingGuardError : std::logic_error {
    using std::logic_error::logic_error;
};

enum class Method { naive, quadrature, spectral, path };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::naive: return "naive";
        case Method::quadrature: return "quadrature";
        case Method::spectral: return "spectral";
        case Method::path: return "path";
    }
    return "?";
}

/// Transform value plus branch diagnostics. quad_error is 0 for closed-form
/// methods; winding is 0 for methods that do not track the determinant path.
struct TransformResult {
    Complex value;
    Method method;
    double quad_error;
    int winding;
};

/// Point u - iv of the strip D: u + I/2 must be positive definite.
class StripPoint {
public:
    StripPoint(SymMatrix u, SymMatrix v) : u_(std::move(u)), v_(std::move(v)) {
        detail::require_same_dim(u_.dim(), v_.dim(), "StripPoint");
        if (u_.max_norm() != 0.0) {
            const Spectrum es = sym_eigen(u_);
            if (!(es.eigenvalues.front() > -0.5))
                throw StripViolationError(
                    "StripPoint: u has an eigenvalue <= -1/2; the point is outside the strip");
        }
    }

    /// Pure Fourier point (u = 0).
    static StripPoint fourier(const SymMatrix& v) {
        return StripPoint(SymMatrix(v.dim()), v);
    }

    const SymMatrix& u() const { return u_; }
    const SymMatrix& v() const { return v_; }
    int dim() const { return v_.dim(); }
    bool pure_fourier() const { return u_.max_norm() == 0.0; }

private:
    SymMatrix u_;
    SymMatrix v_;
};

namespace detail {

// Principal argument in (-pi, pi], with determinants that land within
// rounding distance of the cut snapped onto it: arg = +pi on the negative
// real axis. The golden counterexample det(I - i sqrt(3) I_3) = -8 sits
// exactly on the cut, so tie-breaking must be deterministic.
inline double principal_arg(Complex z) {
    const double az = std::abs(z);
    if (az == 0.0) return 0.0;
    if (std::abs(z.imag()) <= 1e-13 * az) return z.real() >= 0.0 ? 0.0 : std::numbers::pi;
    return std::arg(z);
}

inline Complex principal_log(Complex z) {
    return Complex(std::log(std::abs(z)), principal_arg(z));
}

// round((accumulated - principal)/2pi) with a guard on the residual: the
// difference is an exact multiple of 2pi in exact arithmetic, so a residual
// beyond 0.1 signals a tracking bug.
inline int winding_from_args(double accumulated, double principal) {
    const double sheets = (accumulated - principal) / (2.0 * std::numbers::pi);
    const long w = std::lround(sheets);
    if (std::abs(sheets - static_cast<double>(w)) >= 0.1)
        throw WindingGuardError("winding residual " + std::to_string(sheets) +
                                " is not close to an integer");
    return static_cast<int>(w);
}

inline void require_point_dim(int vdim, const ShapeParam& p, const char* what) {
    require_same_dim(vdim, p.dim(), what);
}

// value = exp(-alpha * (log|prod| + i sum_args)) together with the winding of
// the factor list; shared by the spectral reductions.
inline TransformResult from_factors(const std::vector<Complex>& factors, double alpha,
                                    Method tag) {
    double sum_args = 0.0;
    double sum_logabs = 0.0;
    Complex prod(1.0, 0.0);
    for (const Complex& f : factors) {
        sum_args += std::arg(f);  // every factor has positive real part
        sum_logabs += std::log(std::abs(f));
        prod *= f;
    }
    const Complex value = std::exp(-alpha * Complex(sum_logabs, sum_args));
    const int w = winding_from_args(sum_args, principal_arg(prod));
    return TransformResult{value, tag, 0.0, w};
}

}  // namespace detail

/// The literature's formula, implemented verbatim as the wrong-for-m>=3
/// baseline: principal-branch power of the endpoint determinant.
inline TransformResult naive_cf(const SymMatrix& v, const ShapeParam& p) {
    detail::require_point_dim(v.dim(), p, "naive_cf");
    ComplexMatrix pencil = sym_to_complex(v, Complex(0.0, -2.0));
    pencil.shift_diagonal(1.0);
    const Complex d = complex_det(pencil);
    const Complex value = std::exp(-p.alpha() * detail::principal_log(d));
    return TransformResult{value, Method::naive, 0.0, 0};
}

/// Analytic continuation by adaptive quadrature of the trace-resolvent
/// integrand over [0, 1]; correct on the whole strip D. The achieved error
/// estimate lands in quad_error; winding compares Im(Integral) (the
/// continuously accumulated determinant argument) with the endpoint's
/// principal argument.
inline TransformResult cf_quadrature(const StripPoint& pt, const ShapeParam& p,
                                     double tol = kDefaultQuadTol) {
    detail::require_point_dim(pt.dim(), p, "cf_quadrature");
    if (!(tol >= 1e-13))
        throw std::invalid_argument("cf_quadrature: tol must be >= 1e-13");

    ComplexMatrix w = sym_to_complex(pt.u(), Complex(1.0, 0.0));
    w += sym_to_complex(pt.v(), Complex(0.0, -1.0));
    ComplexMatrix rhs = w;
    rhs *= Complex(2.0, 0.0);

    auto integrand = [&](double t) -> Complex {
        ComplexMatrix pencil = w;
        pencil *= Complex(2.0 * t, 0.0);
        pencil.shift_diagonal(1.0);
        try {
            return trace(complex_lu_solve(pencil, rhs));
        } catch (const SingularMatrixError&) {
            throw StripViolationError(
                "cf_quadrature: resolvent is singular; the point left the strip D");
        }
    };

    const QuadOutcome q = adaptive_gk15(integrand, 0.0, 1.0, tol);

    ComplexMatrix endpoint = w;
    endpoint *= Complex(2.0, 0.0);
    endpoint.shift_diagonal(1.0);
    const Complex det_end = complex_det(endpoint);

    const Complex value = std::exp(-p.alpha() * q.integral);
    const int winding =
        detail::winding_from_args(q.integral.imag(), detail::principal_arg(det_end));
    return TransformResult{value, Method::quadrature, std::max(q.err_re, q.err_im), winding};
}

namespace detail {

// Simultaneous eigenvalues (mu_j, lambda_j) of a commuting pair, via the
// spectrum of u + v/pi with per-vector residual verification.
struct JointSpectrum {
    bool ok = false;
    std::vector<double> mu;
    std::vector<double> lambda;
};

inline JointSpectrum joint_diagonalize(const SymMatrix& u, const SymMatrix& v) {
    const int m = u.dim();
    const double theta = std::numbers::inv_pi;
    const Spectrum es = sym_eigen(u + theta * v);

    JointSpectrum js;
    js.mu.resize(static_cast<size_t>(m));
    js.lambda.resize(static_cast<size_t>(m));
    const double utol = 1e-10 * (1.0 + u.max_norm());
    const double vtol = 1e-10 * (1.0 + v.max_norm());
    for (int k = 0; k < m; ++k) {
        double mu_k = 0.0, lam_k = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                mu_k += es.basis(i, k) * u(i, j) * es.basis(j, k);
                lam_k += es.basis(i, k) * v(i, j) * es.basis(j, k);
            }
        // residual ||A q - (q^T A q) q||_inf for both matrices
        for (int i = 0; i < m; ++i) {
            double ru = -mu_k * es.basis(i, k);
            double rv = -lam_k * es.basis(i, k);
            for (int j = 0; j < m; ++j) {
                ru += u(i, j) * es.basis(j, k);
                rv += v(i, j) * es.basis(j, k);
            }
            if (std::abs(ru) > utol || std::abs(rv) > vtol) return js;
        }
        js.mu[static_cast<size_t>(k)] = mu_k;
        js.lambda[static_cast<size_t>(k)] = lam_k;
    }
    js.ok = true;
    return js;
}

}  // namespace detail

/// Per-eigenvalue continuation. For u = 0 the pencil factors 1 - 2i*lambda_j
/// all have unit real part, so the product of per-factor principal powers is
/// the exact analytic continuation. Commuting (u, v) reduce identically;
/// non-commuting points silently return the quadrature result (check the
/// method tag).
inline TransformResult cf_spectral(const StripPoint& pt, const ShapeParam& p) {
    detail::require_point_dim(pt.dim(), p, "cf_spectral");
    const int m = pt.dim();

    if (pt.pure_fourier()) {
        const Spectrum es = sym_eigen(pt.v());
        std::vector<Complex> factors(static_cast<size_t>(m));
        for (int k = 0; k < m; ++k)
            factors[static_cast<size_t>(k)] =
                Complex(1.0, -2.0 * es.eigenvalues[static_cast<size_t>(k)]);
        return detail::from_factors(factors, p.alpha(), Method::spectral);
    }

    const RealMatrix uv = multiply(pt.u(), pt.v());
    const RealMatrix vu = multiply(pt.v(), pt.u());
    double comm = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            comm = std::max(comm, std::abs(uv(i, j) - vu(i, j)));
    const double comm_tol = 1e-12 * (1.0 + pt.u().max_norm() * pt.v().max_norm());
    if (comm > comm_tol) return cf_quadrature(pt, p);

    const detail::JointSpectrum js = detail::joint_diagonalize(pt.u(), pt.v());
    if (!js.ok) return cf_quadrature(pt, p);

    std::vector<Complex> factors(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k)
        factors[static_cast<size_t>(k)] = Complex(1.0 + 2.0 * js.mu[static_cast<size_t>(k)],
                                                  -2.0 * js.lambda[static_cast<size_t>(k)]);
    return detail::from_factors(factors, p.alpha(), Method::spectral);
}

/// Continuous-argument tracking of the determinant path t |-> det(I - 2t i v)
/// on a uniform grid. Any step whose argument moves by pi/2 or more doubles
/// the whole grid (up to kMaxPathSteps); the accumulated argument then fixes
/// the branch of |det|^{-alpha} exp(-i alpha arg).
inline TransformResult cf_path(const SymMatrix& v, const ShapeParam& p, int steps = 64) {
    detail::require_point_dim(v.dim(), p, "cf_path");
    if (steps < 16) throw std::invalid_argument("cf_path: steps must be >= 16");

    const ComplexMatrix base = sym_to_complex(v, Complex(0.0, -2.0));
    auto det_at = [&](double t) {
        ComplexMatrix pencil = base;
        pencil *= Complex(t, 0.0);
        pencil.shift_diagonal(1.0);
        return complex_det(pencil);
    };

    int n = steps;
    for (;;) {
        double total_arg = 0.0;
        Complex d_prev(1.0, 0.0);  // det at t = 0
        Complex d_end = d_prev;
        bool refine = false;
        for (int k = 1; k <= n; ++k) {
            const Complex d = det_at(static_cast<double>(k) / n);
            // Ostrowski-Taussky: |det(I + iY)| >= det(I) = 1 for symmetric Y
            if (!(std::abs(d) > 0.9))
                throw std::logic_error("cf_path: determinant modulus fell below the "
                                       "Ostrowski-Taussky bound");
            const double step_arg = std::arg(d / d_prev);
            if (!(std::abs(step_arg) < std::numbers::pi / 2.0)) {
                refine = true;
                break;
            }
            total_arg += step_arg;
            d_prev = d;
            d_end = d;
        }
        if (!refine) {
            const Complex value =
                std::exp(-p.alpha() * Complex(std::log(std::abs(d_end)), total_arg));
            const int w =
                detail::winding_from_args(total_arg, detail::principal_arg(d_end));
            return TransformResult{value, Method::path, 0.0, w};
        }
        if (n > kMaxPathSteps / 2)
            throw PathBudgetError("cf_path: grid refinement exceeded " +
                                  std::to_string(kMaxPathSteps) + " steps");
        n *= 2;
    }
}

/// psi(t, u) = (I + 2tu)^{-1} u, the matrix Riccati solution of the Wishart
/// semigroup; computed spectrally and symmetric by construction.
inline SymMatrix psi_closed(double t, const SymMatrix& u) {
    if (!(t >= 0.0 && t <= 1.0))
        throw std::invalid_argument("psi_closed: t must lie in [0, 1]");
    const int m = u.dim();
    const Spectrum es = sym_eigen(u);
    std::vector<double> ratio(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) {
        const double lam = es.eigenvalues[static_cast<size_t>(k)];
        const double denom = 1.0 + 2.0 * t * lam;
        if (std::abs(denom) <= 1e-14 * (1.0 + 2.0 * t * u.max_norm()))
            throw SingularMatrixError("psi_closed: I + 2tu is singular");
        ratio[static_cast<size_t>(k)] = lam / denom;
    }
    SymMatrix psi(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j) {
            double acc = 0.0;
            for (int k = 0; k < m; ++k)
                acc += es.basis(i, k) * ratio[static_cast<size_t>(k)] * es.basis(j, k);
            psi.set(i, j, acc);
        }
    return psi;
}

/// phi(t, u) = alpha * log det(I + 2tu), the real Laplace exponent; requires
/// det(I + 2tu) > 0, which u > -I/2 guarantees on t in [0, 1].
inline double phi_closed(double t, const SymMatrix& u, const ShapeParam& p) {
    detail::require_point_dim(u.dim(), p, "phi_closed");
    if (!(t >= 0.0 && t <= 1.0))
        throw std::invalid_argument("phi_closed: t must lie in [0, 1]");
    const Spectrum es = sym_eigen(u);
    double logdet = 0.0;
    for (double lam : es.eigenvalues) {
        const double factor = 1.0 + 2.0 * t * lam;
        if (!(factor > 0.0))
            throw std::domain_error("phi_closed: det(I + 2tu) is not positive");
        logdet += std::log(factor);
    }
    return p.alpha() * logdet;
}

}  // namespace wishart
