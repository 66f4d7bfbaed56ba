// Wishart distribution machinery: log-density, two exact samplers and the
// Monte Carlo characteristic-function estimator that serves as the
// probabilistic oracle for the transform evaluators.
//
// Shape alpha, identity scale throughout. For half-integer alpha = n/2 a
// sample is the sum of n outer products of standard normal vectors; for
// alpha > (m-1)/2 the density identifies the law as classical Wishart with
// 2*alpha degrees of freedom, sampled exactly by Bartlett decomposition.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "wishart/gindikin.hpp"
#include "wishart/linalg.hpp"
#include "wishart/rng.hpp"

namespace wishart {

/// One Wishart draw. rank_hint is min(m, 2*alpha) for the outer-product
/// construction and m for Bartlett.
struct WishartSample {
    SymMatrix matrix;
    int rank_hint;
};

/// Monte Carlo estimate with componentwise-max standard error; deterministic
/// for fixed (parameters, seed).
struct MCEstimate {
    Complex value;
    double std_error;
    long long n_samples;
    std::uint64_t seed;
};

/// log of the multivariate gamma function Gamma_m(alpha), alpha > (m-1)/2.
inline double lmgamma(int m, double alpha) {
    double s = 0.25 * m * (m - 1) * std::log(std::numbers::pi);
    for (int j = 1; j <= m; ++j) s += std::lgamma(alpha - 0.5 * (j - 1));
    return s;
}

/// Log of the Wishart density at a positive definite xi; only defined in the
/// density regime alpha > (m-1)/2.
inline double log_density(const SymMatrix& xi, const ShapeParam& p) {
    detail::require_same_dim(xi.dim(), p.dim(), "log_density");
    const int m = p.dim();
    const double alpha = p.alpha();
    if (!(alpha > 0.5 * (m - 1)))
        throw std::domain_error("log_density: alpha <= (m-1)/2 has no density");

    const Spectrum es = sym_eigen(xi);
    double logdet = 0.0, tr = 0.0;
    for (double lam : es.eigenvalues) {
        if (!(lam > 0.0))
            throw std::domain_error("log_density: xi is not positive definite");
        logdet += std::log(lam);
        tr += lam;
    }
    return (alpha - 0.5 * (m + 1)) * logdet - 0.5 * tr - m * alpha * std::numbers::ln2 -
           lmgamma(m, alpha);
}

namespace detail {

inline bool half_integer_shape(double alpha, int* n_out) {
    const double twice = 2.0 * alpha;
    const double k = std::round(twice);
    if (std::abs(twice - k) <= 1e-12 && k >= 1.0) {
        *n_out = static_cast<int>(k);
        return true;
    }
    return false;
}

inline SymMatrix draw_outer(const ShapeParam& p, int n, Rng& rng) {
    const int m = p.dim();
    SymMatrix s(m);
    std::vector<double> x(static_cast<size_t>(m));
    for (int draw = 0; draw < n; ++draw) {
        for (int i = 0; i < m; ++i) x[static_cast<size_t>(i)] = rng.normal();
        for (int i = 0; i < m; ++i)
            for (int j = 0; j <= i; ++j)
                s.set(i, j, s(i, j) + x[static_cast<size_t>(i)] * x[static_cast<size_t>(j)]);
    }
    return s;
}

inline SymMatrix draw_bartlett(const ShapeParam& p, Rng& rng) {
    const int m = p.dim();
    RealMatrix l(m);
    for (int j = 0; j < m; ++j) {
        l(j, j) = std::sqrt(rng.chi_square(2.0 * p.alpha() - j));
        for (int k = 0; k < j; ++k) l(j, k) = rng.normal();
    }
    SymMatrix s(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j) {
            double acc = 0.0;
            for (int k = 0; k <= j; ++k) acc += l(i, k) * l(j, k);
            s.set(i, j, acc);
        }
    return s;
}

}  // namespace detail

/// Sum of 2*alpha outer products x x^T of standard normal m-vectors; requires
/// half-integer shape.
inline WishartSample sample_outer(const ShapeParam& p, std::uint64_t rng_seed) {
    int n = 0;
    if (!detail::half_integer_shape(p.alpha(), &n))
        throw ShapeError("sample_outer: 2*alpha must be a positive integer, got alpha = " +
                         std::to_string(p.alpha()));
    Rng rng(rng_seed);
    return WishartSample{detail::draw_outer(p, n, rng), std::min(p.dim(), n)};
}

/// Bartlett construction: lower-triangular L with chi-distributed diagonal
/// (dof 2*alpha - j + 1 in column j) and standard normal subdiagonal; returns
/// L L^T. Exact for every alpha > (m-1)/2.
inline WishartSample sample_bartlett(const ShapeParam& p, std::uint64_t rng_seed) {
    if (!(p.alpha() > 0.5 * (p.dim() - 1)))
        throw ShapeError("sample_bartlett: alpha must exceed (m-1)/2");
    Rng rng(rng_seed);
    return WishartSample{detail::draw_bartlett(p, rng), p.dim()};
}

/// Monte Carlo estimate of E[exp(i tr(v xi))]. Sampler choice is automatic
/// (outer products when 2*alpha is integral, Bartlett otherwise); sample k
/// draws from the substream derived from (seed, k), so sharding over workers
/// reproduces the serial result exactly.
inline MCEstimate mc_charfn(const SymMatrix& v, const ShapeParam& p, long long n,
                            std::uint64_t seed) {
    detail::require_same_dim(v.dim(), p.dim(), "mc_charfn");
    if (n < 100) throw std::invalid_argument("mc_charfn: need n >= 100 samples");

    int n_vectors = 0;
    const bool outer = detail::half_integer_shape(p.alpha(), &n_vectors);
    if (!outer && !(p.alpha() > 0.5 * (p.dim() - 1)))
        throw ShapeError("mc_charfn: no exact sampler for alpha = " + std::to_string(p.alpha()));

    double sum_re = 0.0, sum_im = 0.0, sum_re2 = 0.0, sum_im2 = 0.0;
    for (long long k = 0; k < n; ++k) {
        Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(k));
        const SymMatrix xi =
            outer ? detail::draw_outer(p, n_vectors, rng) : detail::draw_bartlett(p, rng);
        const double theta = trace_product(v, xi);
        const double c = std::cos(theta), s = std::sin(theta);
        sum_re += c;
        sum_im += s;
        sum_re2 += c * c;
        sum_im2 += s * s;
    }

    const double nd = static_cast<double>(n);
    const double mean_re = sum_re / nd;
    const double mean_im = sum_im / nd;
    const double var_re = std::max(0.0, (sum_re2 - nd * mean_re * mean_re) / (nd - 1.0));
    const double var_im = std::max(0.0, (sum_im2 - nd * mean_im * mean_im) / (nd - 1.0));
    const double se = std::sqrt(std::max(var_re, var_im) / nd);
    return MCEstimate{Complex(mean_re, mean_im), se, n, seed};
}

}  // namespace wishart
