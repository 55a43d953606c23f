#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mlp/bounds.hpp"
#include "mlp/error.hpp"

using namespace mlp;

namespace {

PdeProblem allen_cahn_problem(double kappa, double T) {
    return make_problem(1, T, Orientation::Forward, allen_cahn(), constant_datum(kappa));
}

// Direct evaluation of the recursion by plain recursion on long double.
long double cost_direct(int d, int n, int M) {
    if (n == 0) return 0;
    long double c = (2.0L * d + 1) * std::pow(static_cast<long double>(M), n);
    for (int l = 1; l < n; ++l)
        c += std::pow(static_cast<long double>(M), n - l) * (d + 1 + cost_direct(d, l, M) + cost_direct(d, l - 1, M));
    return c;
}

}  // namespace

TEST_CASE("apriori sup bound") {
    CHECK(apriori_sup_bound(0.0, 0.0, 7.0) == 1.0);
    CHECK(apriori_sup_bound(1.0, 2.0, 0.5) == doctest::Approx(std::exp(0.5) * std::sqrt(5.0)));
    CHECK(apriori_sup_bound(1.0, 2.0, 0.5) == doctest::Approx(3.6867).epsilon(1e-4));
    CHECK(apriori_sup_bound(4.0, 3.0, 0.0) == doctest::Approx(std::sqrt(10.0)));
}

TEST_CASE("rho_min") {
    CHECK(rho_min(allen_cahn_problem(2.0, 0.5)) == doctest::Approx(std::exp(0.5) * std::sqrt(5.0)));
    const auto zero = make_problem(1, 1.0, Orientation::Forward, linear_reaction(0.0, 0.0), constant_datum(0.0));
    CHECK(rho_min(zero) == 1.0);
    CHECK(rho_min(allen_cahn_problem(2.0, 1.0)) >= rho_min(allen_cahn_problem(2.0, 0.5)));
}

TEST_CASE("error bound closed form") {
    const auto s = lipschitz_free_surrogate();
    CHECK(error_bound(s, 0, 1, 1.0).value == doctest::Approx(std::exp(0.5)));
    CHECK(error_bound(s, 16, 16, 1.0).value == doctest::Approx(std::exp(8.0) / std::pow(16.0, 8.0)));
    CHECK(error_bound(s, 16, 16, 1.0).value == doctest::Approx(6.94e-7).epsilon(1e-3));

    const auto c = bound_constants(allen_cahn_problem(2.0, 0.5));
    const double r = 3.0, L = 2.0 * (1.0 + 2.0 * r * r);
    const double expected = std::exp(L * 0.5) * 2.0 * std::exp(1.5) * std::pow(1.0 + 2.0 * L * 0.5, 4) / std::pow(3.0, 2.0);
    const auto b = error_bound(c, 4, 3, r);
    CHECK(b.value == doctest::Approx(expected).epsilon(1e-12));
    CHECK_FALSE(b.radius_admissible);
    CHECK(error_bound(c, 4, 3, rho_min(allen_cahn_problem(2.0, 0.5))).radius_admissible);
}

TEST_CASE("diagonal error bound eventually decreases to zero") {
    const auto c = bound_constants(allen_cahn_problem(2.0, 0.5));
    const double r = 1.0;  // 1 + 2 L T = 7: the diagonal peaks near n = 49
    double prev = error_bound(c, 60, 60, r).value;
    for (int n = 61; n < 200; ++n) {
        const double v = error_bound(c, n, n, r).value;
        CHECK(v < prev);
        prev = v;
    }
    CHECK(error_bound(lipschitz_free_surrogate(), 300, 300, 1.0).value < 1e-100);
}

TEST_CASE("error bound with general moments reduces to the closed form") {
    const auto c = bound_constants(allen_cahn_problem(2.0, 0.5), 0.7);
    const double r = 2.0, L = c.lipschitz_local(r);
    // terminal moment kappa and time integral T f0^2 give kappa + T |f0|.
    CHECK(error_bound_general(2.0, 0.5 * 0.49, L, 0.5, 3, 4) ==
          doctest::Approx(error_bound(c, 3, 4, r).value).epsilon(1e-12));
    CHECK(error_bound_general(0.0, 0.0, 1.0, 1.0, 2, 2) == 0.0);
    CHECK_THROWS_AS(error_bound_general(-1.0, 0.0, 1.0, 1.0, 2, 2), ConfigError);
}

TEST_CASE("bound constants need a known f(0) or an override") {
    auto f = allen_cahn();
    f.f_at_zero.reset();
    const auto p = make_problem(1, 1.0, Orientation::Forward, f, constant_datum(1.0));
    CHECK_THROWS_AS(bound_constants(p), ConfigError);
    CHECK(bound_constants(p, 0.25).f0_abs == 0.25);
}

TEST_CASE("cost recursion examples") {
    CHECK(cost_recursion(1, 1, 2) == 6);
    CHECK(cost_recursion(1, 2, 2) == 28);
    CHECK(cost_recursion(10, 1, 3) == 63);
    for (int d : {1, 7, 100}) CHECK(cost_recursion(d, 0, 3) == 0);
    CHECK(cost_bound(1, 1, 2) == 10.0);
    CHECK(cost_bound(1, 2, 2) == 100.0);
    CHECK(cost_bound(10, 1, 3) == 150.0);
}

TEST_CASE("cost recursion matches direct evaluation and the d (5M)^n bound exhaustively") {
    for (int d : {1, 10, 100})
        for (int n = 1; n <= 6; ++n)
            for (int M = 1; M <= 6; ++M) {
                const auto c = cost_recursion(d, n, M);
                CHECK(static_cast<long double>(c) == cost_direct(d, n, M));
                CHECK(static_cast<double>(c) <= cost_bound(d, n, M));
            }
}

TEST_CASE("cost recursion is affine in d") {
    for (int n = 1; n <= 5; ++n)
        for (int M = 1; M <= 5; ++M) {
            const auto c1 = static_cast<std::int64_t>(cost_recursion(1, n, M));
            const auto c2 = static_cast<std::int64_t>(cost_recursion(2, n, M));
            const std::int64_t a = c2 - c1, b = c1 - a;
            for (int d : {3, 10, 100, 1000}) CHECK(static_cast<std::int64_t>(cost_recursion(d, n, M)) == a * d + b);
        }
}

TEST_CASE("cost recursion reports overflow") {
    CHECK_THROWS_AS(cost_recursion(100, 30, 30), NumericError);
    CHECK_THROWS_AS(cost_recursion(0, 1, 1), ConfigError);
    CHECK_THROWS_AS(cost_recursion(1, 1, 0), ConfigError);
}

TEST_CASE("level selection with the L = 0 surrogate") {
    const auto s = lipschitz_free_surrogate();
    const auto sched = default_schedule();
    // Direct scan of e^{m/2} m^{-m/2}: least m whose bound and all later ones are <= 1e-6.
    int expected = 0;
    for (int m = 64; m >= 1; --m) {
        if (std::exp(m / 2.0) * std::pow(m, -m / 2.0) <= 1e-6) expected = m;
        else break;
    }
    CHECK(expected == 16);
    const auto sel = select_levels(1e-6, s, sched);
    CHECK(sel.level == 16);
    CHECK(sel.tail_decreasing);
    CHECK(sel.bound_at_level <= 1e-6);
    CHECK(select_levels(0.5, s, sched).level == 4);
    CHECK(select_levels(0.015625, s, sched).level == 8);
}

TEST_CASE("level selection is monotone in epsilon") {
    const auto sched = default_schedule();
    for (const auto& c : {lipschitz_free_surrogate(), bound_constants(allen_cahn_problem(2.0, 0.5))}) {
        int prev = 1 << 30;
        for (int j = 6; j >= 1; --j) {
            const double eps = std::ldexp(1.0, -j);
            const int n = select_levels(eps, c, sched, 3000).level;
            CHECK(n <= prev);
            prev = n;
        }
    }
}

TEST_CASE("level selection returns 1 when every bound is below epsilon") {
    auto c = lipschitz_free_surrogate();
    c.kappa = 1e-12;
    CHECK(select_levels(0.5, c, default_schedule()).level == 1);
}

TEST_CASE("level selection reports the cap") {
    const auto c = bound_constants(allen_cahn_problem(2.0, 0.5));
    try {
        select_levels(1e-3, c, default_schedule(), 10);
        FAIL("expected CapExceeded");
    } catch (const CapExceeded& e) {
        CHECK(e.best_bound() > 1e-3);
        CHECK(e.best_level() >= 1);
    }
    CHECK_THROWS_AS(select_levels(0.0, c, default_schedule()), ConfigError);
    CHECK_THROWS_AS(select_levels(1.5, c, default_schedule()), ConfigError);
}

TEST_CASE("cumulative cost") {
    CHECK(cumulative_cost(1, 1, 0) == 3);
    for (int d : {1, 10})
        for (int N = 1; N <= 6; ++N)
            CHECK(cumulative_cost(d, N + 1, 0) - cumulative_cost(d, N, 0) == cost_recursion(d, N + 1, N + 1));
    CHECK(cumulative_cost(1, 2, 1) == cumulative_cost(1, 3, 0));
}

TEST_CASE("partial sums of (alpha m)^m are at most 2 (alpha n)^n") {
    for (double alpha : {1.0, 2.0, 5.0})
        for (int n = 1; n <= 10; ++n) {
            long double sum = 0;
            for (int m = 1; m <= n; ++m) sum += std::pow(static_cast<long double>(alpha * m), m);
            CHECK(sum <= 2.0L * std::pow(static_cast<long double>(alpha * n), n));
        }
}
