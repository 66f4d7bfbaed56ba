#include <catch2/catch.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "test_support.hpp"
#include "wishart/quadrature.hpp"
#include "wishart/rng.hpp"

using namespace wishart;

TEST_CASE("rng streams are deterministic and splittable") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());

    // derived substreams differ from each other and from the base stream
    Rng d0 = Rng::derive(42, 0);
    Rng d1 = Rng::derive(42, 1);
    REQUIRE(d0.next_u64() != d1.next_u64());
    REQUIRE(Rng::derive(42, 7).next_u64() == Rng::derive(42, 7).next_u64());
}

TEST_CASE("uniform draws stay in range") {
    Rng rng(3);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        const double v = rng.uniform_open();
        REQUIRE(v > 0.0);
        REQUIRE(v < 1.0);
    }
}

TEST_CASE("normal and gamma moments") {
    Rng rng(4);
    const int n = 200000;

    SECTION("standard normal") {
        std::vector<double> xs(n);
        for (double& x : xs) x = rng.normal();
        const auto ms = testsupport::mean_se(xs);
        REQUIRE(std::abs(ms.mean) < 4.0 * ms.se);
        double var = 0.0;
        for (double x : xs) var += x * x;
        var /= n;
        REQUIRE(var == Approx(1.0).margin(4.0 * std::sqrt(2.0 / n)));
    }

    SECTION("gamma with shape below and above one") {
        for (double k : {0.3, 1.0, 2.5}) {
            std::vector<double> xs(n);
            for (double& x : xs) x = rng.gamma(k);
            const auto ms = testsupport::mean_se(xs);
            REQUIRE(ms.mean == Approx(k).margin(4.0 * ms.se));
            double var = 0.0;
            for (double x : xs) var += (x - ms.mean) * (x - ms.mean);
            var /= (n - 1);
            REQUIRE(var == Approx(k).epsilon(0.05));  // Var Gamma(k,1) = k
        }
    }

    SECTION("chi-square mean equals dof") {
        std::vector<double> xs(n);
        for (double& x : xs) x = rng.chi_square(3.0);
        const auto ms = testsupport::mean_se(xs);
        REQUIRE(ms.mean == Approx(3.0).margin(4.0 * ms.se));
    }
}

TEST_CASE("gamma sampler matches the analytic CDF") {
    Rng rng(5);
    const int n = 10000;
    for (double k : {0.5, 2.0}) {
        std::vector<double> xs(n);
        for (double& x : xs) x = rng.gamma(k);
        const double d =
            testsupport::ks_statistic(xs, [&](double x) { return testsupport::gamma_cdf(k, 1.0, x); });
        REQUIRE(d < 1.627 / std::sqrt(static_cast<double>(n)));  // 1% critical value
    }
}

TEST_CASE("adaptive GK15 reproduces closed-form integrals") {
    SECTION("real oscillatory") {
        const QuadOutcome q =
            adaptive_gk15([](double t) { return std::complex<double>(std::cos(10.0 * t), 0.0); },
                          0.0, 1.0, 1e-12);
        REQUIRE(q.err_re <= 1e-12);
        REQUIRE(q.integral.real() == Approx(std::sin(10.0) / 10.0).margin(1e-12));
        REQUIRE(std::abs(q.integral.imag()) < 1e-14);
    }
    SECTION("complex exponential") {
        const double a = 7.3;
        const QuadOutcome q = adaptive_gk15(
            [a](double t) { return std::exp(std::complex<double>(0.0, a * t)); }, 0.0, 1.0,
            1e-12);
        const std::complex<double> expect =
            (std::exp(std::complex<double>(0.0, a)) - 1.0) / std::complex<double>(0.0, a);
        REQUIRE(std::abs(q.integral - expect) < 1e-12);
        REQUIRE(q.err_re <= 1e-12);
        REQUIRE(q.err_im <= 1e-12);
    }
    SECTION("resolvent-style integrand") {
        const QuadOutcome q = adaptive_gk15(
            [](double t) { return std::complex<double>(1.0 / (1.0 + t * t), 0.0); }, 0.0, 1.0,
            1e-13);
        REQUIRE(q.integral.real() == Approx(std::numbers::pi / 4.0).margin(1e-13));
    }
    SECTION("budget exhaustion throws") {
        REQUIRE_THROWS_AS(
            adaptive_gk15([](double t) { return std::complex<double>(std::cos(40.0 * t), 0.0); },
                          0.0, 1.0, 1e-13, 2),
            QuadBudgetError);
    }
}
