// Counter-based splittable random number generation.
//
// The generator is a splitmix-style stream: the state is a counter advanced
// by the golden-ratio increment and each output is a strong 64-bit mix of it.
// Substreams are derived by hashing (seed, stream index), which is what makes
// Monte Carlo estimates shardable with bit-identical serial/parallel results:
// every sample or path owns its own derived stream.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace wishart {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace detail

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Independent substream for (seed, stream). Used to give each Monte
    /// Carlo sample / SDE path its own generator.
    static Rng derive(std::uint64_t seed, std::uint64_t stream) {
        return Rng(detail::mix64(seed + detail::kGolden) ^
                   detail::mix64(stream * 0xD1342543DE82EF95ull + 0x632BE59BD9B4E019ull));
    }

    std::uint64_t next_u64() {
        state_ += detail::kGolden;
        return detail::mix64(state_);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1); never returns an endpoint, so logs are safe.
    double uniform_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (cosine branch only; two uniforms per
    /// draw, no cached state).
    double normal() {
        const double r = std::sqrt(-2.0 * std::log(uniform_open()));
        return r * std::cos(2.0 * std::numbers::pi * uniform());
    }

    /// Gamma(shape k, scale 1) by Marsaglia-Tsang squeeze; k < 1 handled by
    /// the boost Gamma(k+1) * U^(1/k).
    double gamma(double k) {
        if (k < 1.0) {
            const double u = uniform_open();
            return gamma(k + 1.0) * std::pow(u, 1.0 / k);
        }
        const double d = k - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, vcube;
            do {
                x = normal();
                vcube = 1.0 + c * x;
            } while (vcube <= 0.0);
            vcube = vcube * vcube * vcube;
            const double u = uniform_open();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * vcube;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - vcube + std::log(vcube))) return d * vcube;
        }
    }

    /// chi-square with dof degrees of freedom (dof need not be integral).
    double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

private:
    std::uint64_t state_;
};

}  // namespace wishart
