// Wishart matrix SDE  dX = sqrt(X) dB + dB^T sqrt(X) + 2 alpha I dt,  X_0 = 0,
// simulated by Euler-Maruyama with PSD eigenvalue clamping, plus the Laplace
// transform estimator E[exp(-tr(u X_t))] used as the dynamic oracle against
// exp(-phi(t, u)).
//
// Each step eigendecomposes the current state once: the decomposition yields
// both the PSD projection (negative eigenvalues clamped to zero) and the
// matrix square root driving the diffusion. Increments are formed as
// G + G^T + 2 alpha dt I, so states are symmetric by construction.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wishart/distribution.hpp"
#include "wishart/gindikin.hpp"
#include "wishart/linalg.hpp"
#include "wishart/rng.hpp"

namespace wishart {

/// Discretization bias allowance: |estimate - target| bands are
/// 4*SE + kEulerBiasConstant * dt. Calibrated on the m = 1 squared Bessel
/// case, where the exact transform (1 + 2u)^{-alpha} is known: the worst
/// measured |bias| * n_steps on the 1000-step grid is 8.9 (alpha = 1/2,
/// u = 1, 2e5 paths; the boundary shape makes clamping bias decay like
/// sqrt(dt), so the linear allowance is anchored at this grid scale).
inline constexpr double kEulerBiasConstant = 12.0;

struct SdeConfig {
    SdeConfig(ShapeParam p_, double t_end_, int n_steps_, int n_paths_, std::uint64_t seed_)
        : p(p_), t_end(t_end_), n_steps(n_steps_), n_paths(n_paths_), seed(seed_) {
        if (n_steps < 100) throw std::invalid_argument("SdeConfig: need n_steps >= 100");
        if (!(t_end > 0.0 && t_end <= 4.0))
            throw std::invalid_argument("SdeConfig: t_end must lie in (0, 4]");
        if (n_paths < 1) throw std::invalid_argument("SdeConfig: need n_paths >= 1");
    }

    ShapeParam p;
    double t_end;
    int n_steps;
    int n_paths;
    std::uint64_t seed;
};

struct SdePath {
    std::vector<double> times;
    std::vector<SymMatrix> states;
};

namespace detail {

// One Euler step in place. x must be PSD-clamped already on entry and is
// PSD-clamped on exit.
inline void euler_step(SymMatrix& x, double alpha, double dt, Rng& rng) {
    const int m = x.dim();
    const double sqrt_dt = std::sqrt(dt);

    if (m == 1) {  // scalar squared-Bessel step, same arithmetic as the general path
        const double g = std::sqrt(std::max(x(0, 0), 0.0)) * (sqrt_dt * rng.normal());
        double next = x(0, 0) + g + g + 2.0 * alpha * dt;
        if (next < 0.0) next = 0.0;
        x.set(0, 0, next);
        return;
    }

    // sqrt of the current state
    const Spectrum es = sym_eigen(x);
    RealMatrix root(m);
    {
        std::vector<double> r(static_cast<size_t>(m));
        for (int k = 0; k < m; ++k)
            r[static_cast<size_t>(k)] =
                std::sqrt(std::max(es.eigenvalues[static_cast<size_t>(k)], 0.0));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double acc = 0.0;
                for (int k = 0; k < m; ++k)
                    acc += es.basis(i, k) * r[static_cast<size_t>(k)] * es.basis(j, k);
                root(i, j) = acc;
            }
    }

    RealMatrix db(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) db(i, j) = sqrt_dt * rng.normal();

    const RealMatrix g = multiply(root, db);
    SymMatrix next(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j)
            next.set(i, j, x(i, j) + g(i, j) + g(j, i) + (i == j ? 2.0 * alpha * dt : 0.0));

    // PSD projection: clamp negative eigenvalues of the proposal to zero
    const Spectrum ps = sym_eigen(next);
    bool clean = true;
    for (double lam : ps.eigenvalues)
        if (lam < 0.0) { clean = false; break; }
    if (clean) {
        x = next;
        return;
    }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j) {
            double acc = 0.0;
            for (int k = 0; k < m; ++k) {
                const double lam = std::max(ps.eigenvalues[static_cast<size_t>(k)], 0.0);
                acc += ps.basis(i, k) * lam * ps.basis(j, k);
            }
            x.set(i, j, acc);
        }
}

// Unvalidated simulation core; alpha may be anything (the zero-drift sanity
// test drives it with alpha = 0).
inline SdePath simulate_with_alpha(double alpha, int m, double t_end, int n_steps,
                                   std::uint64_t path_seed, bool record) {
    Rng rng(path_seed);
    const double dt = t_end / n_steps;
    SdePath path;
    SymMatrix x(m);  // X_0 = 0
    if (record) {
        path.times.reserve(static_cast<size_t>(n_steps) + 1);
        path.states.reserve(static_cast<size_t>(n_steps) + 1);
        path.times.push_back(0.0);
        path.states.push_back(x);
    }
    for (int k = 1; k <= n_steps; ++k) {
        euler_step(x, alpha, dt, rng);
        if (record) {
            path.times.push_back(dt * k);
            path.states.push_back(x);
        }
    }
    if (!record) {
        path.times.push_back(t_end);
        path.states.push_back(x);
    }
    return path;
}

}  // namespace detail

/// Simulates one path from X_0 = 0 with the given per-path seed, recording
/// every state on the uniform grid.
inline SdePath simulate_path(const SdeConfig& cfg, std::uint64_t path_seed) {
    return detail::simulate_with_alpha(cfg.p.alpha(), cfg.p.dim(), cfg.t_end, cfg.n_steps,
                                       path_seed, true);
}

/// Laplace-transform estimates E[exp(-tr(u X_{t_end}))] for several PSD u
/// sharing one set of simulated paths. Path j uses the substream derived from
/// (cfg.seed, j); since path generation does not depend on u, these estimates
/// are bit-identical to evaluating each u with its own laplace_via_sde call.
inline std::vector<MCEstimate> laplace_via_sde_multi(const SdeConfig& cfg,
                                                     const std::vector<SymMatrix>& us) {
    for (const SymMatrix& u : us) {
        detail::require_same_dim(u.dim(), cfg.p.dim(), "laplace_via_sde");
        const Spectrum es = sym_eigen(u);
        if (es.eigenvalues.front() < -1e-10 * u.max_norm())
            throw std::domain_error("laplace_via_sde: u must be positive semidefinite");
    }

    std::vector<double> sum(us.size(), 0.0), sum2(us.size(), 0.0);
    for (int j = 0; j < cfg.n_paths; ++j) {
        const std::uint64_t path_seed =
            Rng::derive(cfg.seed, static_cast<std::uint64_t>(j)).next_u64();
        const SdePath path = detail::simulate_with_alpha(
            cfg.p.alpha(), cfg.p.dim(), cfg.t_end, cfg.n_steps, path_seed, false);
        const SymMatrix& terminal = path.states.back();
        for (size_t q = 0; q < us.size(); ++q) {
            const double y = std::exp(-trace_product(us[q], terminal));
            sum[q] += y;
            sum2[q] += y * y;
        }
    }

    const double nd = static_cast<double>(cfg.n_paths);
    std::vector<MCEstimate> out;
    out.reserve(us.size());
    for (size_t q = 0; q < us.size(); ++q) {
        const double mean = sum[q] / nd;
        const double var =
            cfg.n_paths > 1
                ? std::max(0.0, (sum2[q] - nd * mean * mean) / (nd - 1.0))
                : 0.0;
        out.push_back(MCEstimate{Complex(mean, 0.0), std::sqrt(var / nd),
                                 cfg.n_paths, cfg.seed});
    }
    return out;
}

inline MCEstimate laplace_via_sde(const SdeConfig& cfg, const SymMatrix& u) {
    return laplace_via_sde_multi(cfg, {u}).front();
}

}  // namespace wishart
