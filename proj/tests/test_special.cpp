#include "doctest.h"

#include <cmath>
#include <random>

#include "gpelab/special.hpp"
#include "support/oracles.hpp"

using namespace gpelab;

TEST_CASE("log_gamma reference values") {
    CHECK(log_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(log_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-13));
    CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(M_PI)).epsilon(1e-13));
    CHECK_THROWS_AS(log_gamma(0.0), DomainError);
    CHECK_THROWS_AS(log_gamma(-1.5), DomainError);
}

TEST_CASE("sphere_measure closed forms") {
    CHECK(sphere_measure(3) == doctest::Approx(4.0 * M_PI).epsilon(1e-14));
    CHECK(sphere_measure(4) == doctest::Approx(2.0 * M_PI * M_PI).epsilon(1e-14));
    CHECK(sphere_measure(6) == doctest::Approx(std::pow(M_PI, 3)).epsilon(1e-14));
    CHECK_THROWS_AS(sphere_measure(1), DomainError);
}

TEST_CASE("power_integral elementary cases") {
    CHECK(power_integral(1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(power_integral(0.0, 1.0) == doctest::Approx(0.5 * M_PI).epsilon(1e-14));
    // (1/2) B(3.5, 1.5), cross-checked against adaptive quadrature below.
    CHECK(power_integral(6.0, 5.0) == doctest::Approx(0.0613592315).epsilon(1e-8));
}

TEST_CASE("power_integral divergence flags") {
    CHECK_THROWS_AS(power_integral(6.0, 3.5), DivergenceError);   // slow decay at infinity
    CHECK_THROWS_AS(power_integral(-1.0, 3.0), DivergenceError);  // not integrable at 0
    // || |x| U ||_{L^2} in d = 6 corresponds to a = 7, b = 4: divergent.
    CHECK_THROWS_AS(power_integral(7.0, 4.0), DivergenceError);
}

TEST_CASE("power_integral agrees with adaptive quadrature across the domain") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> ua(0.0, 8.0);
    std::uniform_real_distribution<double> margin(0.75, 6.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double a = ua(rng);
        const double b = 0.5 * (a + 1.0) + margin(rng);
        const double closed = power_integral(a, b);
        const double quad = oracle::power_integral_quadrature(a, b, 1e-14 * closed);
        CHECK(std::abs(closed - quad) <= 1e-10 * closed);
    }
}

TEST_CASE("kummer_m trivial and terminating values") {
    CHECK(kummer_m(0.7, 1.3, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(kummer_m(-1.0, 2.5, 0.8) == doctest::Approx(1.0 - 0.8 / 2.5).epsilon(1e-15));
    CHECK(kummer_m(-2.0, 3.0, 1.0) == doctest::Approx(5.0 / 12.0).epsilon(1e-15));
    CHECK_THROWS_AS(kummer_m(1.0, 0.0, 0.5), DomainError);
    CHECK_THROWS_AS(kummer_m(1.0, -2.0, 0.5), DomainError);
}

TEST_CASE("kummer_m non-terminating series against exponential identities") {
    // M(a; a; x) = e^x and M(1; 2; x) = (e^x - 1)/x.
    for (double x : {0.3, 1.0, 2.7, 6.0}) {
        CHECK(kummer_m(1.7, 1.7, x) == doctest::Approx(std::exp(x)).epsilon(1e-13));
        CHECK(kummer_m(1.0, 2.0, x) ==
              doctest::Approx((std::exp(x) - 1.0) / x).epsilon(1e-13));
    }
}

TEST_CASE("kummer_m terminating cases match exact rational arithmetic") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> un(0, 4);
    std::uniform_int_distribution<int> uq(1, 5);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = un(rng);
        const oracle::Fraction b(uq(rng) + 1, uq(rng));  // b > 0 keeps it admissible
        const oracle::Fraction x(uq(rng), uq(rng));
        const oracle::Fraction exact = oracle::kummer_polynomial_exact(n, b, x);
        const double approx = kummer_m(-n, b.value(), x.value());
        CHECK(approx == doctest::Approx(exact.value()).epsilon(1e-13));
    }
}
