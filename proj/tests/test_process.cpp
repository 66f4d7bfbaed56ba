#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "test_support.hpp"
#include "wishart/charfn.hpp"
#include "wishart/process.hpp"

using namespace wishart;

TEST_CASE("SdeConfig validation") {
    const ShapeParam p(1.0, 2);
    REQUIRE_THROWS_AS(SdeConfig(p, 1.0, 50, 100, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(SdeConfig(p, 5.0, 1000, 100, 1), std::invalid_argument);
    REQUIRE_NOTHROW(SdeConfig(p, 1.0, 100, 1, 1));
}

TEST_CASE("zero drift keeps the path at zero") {
    const SdePath path = detail::simulate_with_alpha(0.0, 2, 1.0, 100, 99, true);
    REQUIRE(path.states.size() == 101);
    for (const SymMatrix& x : path.states) REQUIRE(x.max_norm() == 0.0);
}

TEST_CASE("simulated paths start at zero and stay PSD") {
    const ShapeParam p(1.0, 2);
    const SdeConfig cfg(p, 1.0, 200, 1, 7);
    const SdePath path = simulate_path(cfg, 1234);
    REQUIRE(path.times.size() == 201);
    REQUIRE(path.states.size() == 201);
    REQUIRE(path.states.front().max_norm() == 0.0);
    REQUIRE(path.times.front() == 0.0);
    REQUIRE(path.times.back() == Approx(1.0).margin(1e-12));
    for (size_t k = 0; k < path.states.size(); k += 20) {
        const Spectrum es = sym_eigen(path.states[k]);
        REQUIRE(es.eigenvalues.front() >= -1e-12 * (1.0 + path.states[k].max_norm()));
    }
}

TEST_CASE("mean of the process is 2 alpha t I") {
    const ShapeParam p(1.0, 2);
    const int n_paths = 10000;
    const SdeConfig cfg(p, 1.0, 200, n_paths, 11);
    std::vector<std::vector<double>> entries(3);
    for (int j = 0; j < n_paths; ++j) {
        const std::uint64_t path_seed = Rng::derive(cfg.seed, j).next_u64();
        const SdePath path =
            detail::simulate_with_alpha(p.alpha(), 2, cfg.t_end, cfg.n_steps, path_seed, false);
        const SymMatrix& x = path.states.back();
        entries[0].push_back(x(0, 0));
        entries[1].push_back(x(1, 0));
        entries[2].push_back(x(1, 1));
    }
    const double expects[3] = {2.0, 0.0, 2.0};
    for (int slot = 0; slot < 3; ++slot) {
        const auto ms = testsupport::mean_se(entries[static_cast<size_t>(slot)]);
        REQUIRE(ms.mean == Approx(expects[slot]).margin(4.0 * ms.se));
    }
}

TEST_CASE("laplace_via_sde") {
    SECTION("u = 0 is exactly one") {
        const SdeConfig cfg(ShapeParam(1.0, 2), 1.0, 100, 200, 5);
        const MCEstimate e = laplace_via_sde(cfg, SymMatrix(2));
        REQUIRE(e.value == Complex(1.0, 0.0));
        REQUIRE(e.std_error == 0.0);
    }
    SECTION("m=1 squared Bessel: E[exp(-X_1)] = 3^{-1/2}") {
        const SdeConfig cfg(ShapeParam(0.5, 1), 1.0, 500, 5000, 21);
        const MCEstimate e = laplace_via_sde(cfg, SymMatrix::identity(1));
        const double target = 1.0 / std::sqrt(3.0);
        const double band = 4.0 * e.std_error + kEulerBiasConstant / 500.0;
        REQUIRE(std::abs(e.value.real() - target) <= band);
    }
    SECTION("m=2 closed form 1/9") {
        const SdeConfig cfg(ShapeParam(1.0, 2), 1.0, 500, 10000, 22);
        const MCEstimate e = laplace_via_sde(cfg, SymMatrix::identity(2));
        const double band = 4.0 * e.std_error + kEulerBiasConstant / 500.0;
        REQUIRE(std::abs(e.value.real() - 1.0 / 9.0) <= band);
    }
    SECTION("m=3 mixed diagonal target 6^{-3/2}") {
        const SdeConfig cfg(ShapeParam(1.5, 3), 1.0, 300, 4000, 23);
        const MCEstimate e = laplace_via_sde(cfg, SymMatrix::diagonal({1.0, 0.5, 0.0}));
        const double target = std::pow(6.0, -1.5);
        const double band = 4.0 * e.std_error + kEulerBiasConstant / 300.0;
        REQUIRE(std::abs(e.value.real() - target) <= band);
    }
    SECTION("multi-u estimates match per-u calls bitwise") {
        const SdeConfig cfg(ShapeParam(1.0, 2), 1.0, 100, 500, 31);
        const SymMatrix u1 = SymMatrix::identity(2);
        const SymMatrix u2 = SymMatrix::diagonal({1.0, 0.25});
        const auto multi = laplace_via_sde_multi(cfg, {u1, u2});
        const MCEstimate a = laplace_via_sde(cfg, u1);
        const MCEstimate b = laplace_via_sde(cfg, u2);
        REQUIRE(multi[0].value.real() == a.value.real());
        REQUIRE(multi[0].std_error == a.std_error);
        REQUIRE(multi[1].value.real() == b.value.real());
        REQUIRE(multi[1].std_error == b.std_error);
    }
    SECTION("indefinite u is rejected") {
        const SdeConfig cfg(ShapeParam(1.0, 2), 1.0, 100, 100, 6);
        REQUIRE_THROWS_AS(laplace_via_sde(cfg, SymMatrix::diagonal({1.0, -0.2})),
                          std::domain_error);
    }
}

TEST_CASE("Euler bias decays as the grid refines") {
    // m = 1, alpha = 1/2, u = 1: exact value 3^{-1/2}. With a large shared
    // path count the discretization error dominates and should shrink as
    // n_steps doubles (weak order one).
    const double target = 1.0 / std::sqrt(3.0);
    const SymMatrix u = SymMatrix::identity(1);
    std::vector<double> errs;
    for (int steps : {125, 250, 500, 1000}) {
        const SdeConfig cfg(ShapeParam(0.5, 1), 1.0, steps, 100000, 61);
        const MCEstimate e = laplace_via_sde(cfg, u);
        errs.push_back(std::abs(e.value.real() - target));
        REQUIRE(std::abs(e.value.real() - target) <=
                4.0 * e.std_error + kEulerBiasConstant / steps);
    }
    REQUIRE(errs[0] > errs[2]);
    REQUIRE(errs[1] > errs[3]);
    REQUIRE(errs.front() > 2.0 * errs.back());
}
