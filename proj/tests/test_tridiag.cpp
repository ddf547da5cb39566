#include "doctest.h"

#include <cmath>
#include <random>

#include "gpelab/tridiag.hpp"

using namespace gpelab;

TEST_CASE("solve_tridiagonal identity and 2x2 hand cases") {
    TridiagonalOperator id({1.0, 1.0, 1.0}, {0.0, 0.0});
    const auto x = solve_tridiagonal(id, {1.0, 2.0, 3.0});
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(2.0));
    CHECK(x[2] == doctest::Approx(3.0));

    TridiagonalOperator t2({2.0, 2.0}, {-1.0});
    const auto y = solve_tridiagonal(t2, {1.0, 0.0});
    CHECK(y[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(y[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("solve_tridiagonal random systems satisfy the residual contract") {
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng() % 200);
        std::vector<double> d(n), e(n - 1), rhs(n);
        for (auto& v : e) v = u(rng);
        for (auto& v : rhs) v = u(rng);
        for (std::size_t i = 0; i < n; ++i) {
            const double row = (i > 0 ? std::abs(e[i - 1]) : 0.0) +
                               (i + 1 < n ? std::abs(e[i]) : 0.0);
            d[i] = row + 0.5 + std::abs(u(rng));  // strictly diagonally dominant
        }
        TridiagonalOperator T(d, e);
        const auto x = solve_tridiagonal(T, rhs);  // residual checked inside
        CHECK(x.size() == n);
    }
}

TEST_CASE("solve_tridiagonal flags singular systems") {
    TridiagonalOperator s({1.0, 1.0}, {1.0});  // det = 0
    CHECK_THROWS_AS(solve_tridiagonal(s, {1.0, 1.0}), SingularMatrixError);
}

TEST_CASE("pivoting handles zero diagonal entries") {
    // [[0, 1], [1, 0]] x = (2, 3) -> x = (3, 2); Thomas without pivoting fails here.
    const auto x = solve_tridiagonal_general({1.0}, {0.0, 0.0}, {1.0}, {2.0, 3.0});
    CHECK(x[0] == doctest::Approx(3.0));
    CHECK(x[1] == doctest::Approx(2.0));
}

TEST_CASE("count_eigs_below on diagonal and Laplacian matrices") {
    TridiagonalOperator diag({1.0, 2.0, 3.0}, {0.0, 0.0});
    CHECK(count_eigs_below(diag, 2.5) == 2);
    CHECK(count_eigs_below(diag, 0.0) == 0);

    // Discrete Laplacian: eigenvalues 2 - sqrt(2), 2, 2 + sqrt(2).
    TridiagonalOperator lap({2.0, 2.0, 2.0}, {-1.0, -1.0});
    CHECK(count_eigs_below(lap, 2.0) == 1);
    CHECK(count_eigs_below(lap, 0.5) == 0);
    CHECK(count_eigs_below(lap, 3.0) == 2);
    CHECK(count_eigs_below(lap, 4.0) == 3);
}

TEST_CASE("count_eigs_below is monotone in lambda") {
    std::mt19937 rng(321);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 3 + static_cast<std::size_t>(rng() % 60);
        std::vector<double> d(n), e(n - 1);
        for (auto& v : d) v = u(rng);
        for (auto& v : e) v = u(rng);
        TridiagonalOperator T(d, e);
        double l1 = u(rng) * 3.0, l2 = u(rng) * 3.0;
        if (l1 > l2) std::swap(l1, l2);
        CHECK(count_eigs_below(T, l1) <= count_eigs_below(T, l2));
        CHECK(count_eigs_below(T, 1e9) == n);
    }
}

TEST_CASE("breakdown pivots are perturbed and flagged") {
    TridiagonalOperator T({1.0, 1.0}, {0.0});
    const auto res = count_eigs_below_checked(T, 1.0);  // exact ties on the diagonal
    CHECK(res.pivot_perturbed);
}

TEST_CASE("eigenvalue_by_count reproduces the discrete Laplacian spectrum") {
    const std::size_t n = 40;
    TridiagonalOperator T(std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0));
    for (std::size_t k : {std::size_t(1), std::size_t(3), std::size_t(17), n}) {
        const double expected =
            2.0 - 2.0 * std::cos(M_PI * static_cast<double>(k) / (n + 1.0));
        CHECK(eigenvalue_by_count(T, k, 1e-10) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("diagonal weight turns the count into a pencil count") {
    // A x = lambda W x with W = 4 I halves... quarters the spectrum of A.
    const std::size_t n = 12;
    RadialGrid g = RadialGrid::log_spaced(3, 1.0, 2.0, n);
    TridiagonalOperator A(std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0),
                          std::vector<double>(n, 4.0), g);
    TridiagonalOperator plain(std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0));
    for (double lam : {0.1, 0.5, 0.9}) {
        CHECK(count_eigs_below(A, lam) == count_eigs_below(plain, 4.0 * lam));
    }
}
