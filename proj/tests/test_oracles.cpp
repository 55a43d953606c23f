#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mlp/bounds.hpp"
#include "mlp/error.hpp"
#include "mlp/oracles.hpp"

using namespace mlp;

namespace {

OdeOracle allen_cahn_ode(double u0, double T = 0.5) {
    OdeOracle o;
    o.f = [](double y) { return y - y * y * y; };
    o.u0 = u0;
    o.horizon = T;
    o.step = T / 100;
    return o;
}

PdeProblem fd_problem(DataFunction g, double T = 0.5) {
    return make_problem(1, T, Orientation::Forward, allen_cahn(), std::move(g));
}

const double kTimes[] = {0.0, 0.125, 0.25, 0.375, 0.5};

}  // namespace

TEST_CASE("closed form solves y' = y - y^3") {
    for (double u0 : {-1.5, 0.3, 2.0}) {
        for (double t : {0.1, 0.5, 1.3}) {
            const double h = 1e-5;
            const double dydt = (allen_cahn_closed_form(u0, t + h) - allen_cahn_closed_form(u0, t - h)) / (2 * h);
            const double y = allen_cahn_closed_form(u0, t);
            CHECK(dydt == doctest::Approx(y - y * y * y).epsilon(1e-8));
        }
        CHECK(allen_cahn_closed_form(u0, 0.0) == doctest::Approx(u0));
    }
    CHECK(allen_cahn_closed_form(2.0, 0.5) == doctest::Approx(1.17517).epsilon(1e-5));
}

TEST_CASE("RK4 agrees with the closed form to 1e-8") {
    for (double u0 : {-1.5, 0.3, 2.0})
        for (double t : {0.0, 0.2, 0.5}) CHECK(std::abs(ode_solve(allen_cahn_ode(u0), t) - allen_cahn_closed_form(u0, t)) < 1e-8);
}

TEST_CASE("ODE equilibria") {
    for (double t : {0.0, 0.25, 0.5}) {
        CHECK(ode_solve(allen_cahn_ode(0.0), t) == 0.0);
        CHECK(ode_solve(allen_cahn_ode(1.0), t) == 1.0);
    }
}

TEST_CASE("ODE oracle from a problem") {
    const auto o = ode_oracle(fd_problem(constant_datum(2.0)));
    CHECK(o.u0 == 2.0);
    CHECK(o.horizon == 0.5);
    CHECK(ode_solve(o, 0.5) == doctest::Approx(allen_cahn_closed_form(2.0, 0.5)).epsilon(1e-10));
    CHECK_THROWS_AS(ode_oracle(fd_problem(gaussian_bump_datum(1.0))), ConfigError);
}

TEST_CASE("ODE blow-up and argument checks") {
    OdeOracle o;
    o.f = [](double y) { return y * y; };
    o.u0 = 1.0;
    o.horizon = 2.0;
    o.step = 0.01;
    CHECK_THROWS_AS(ode_solve(o, 2.0), NumericError);
    auto bad = allen_cahn_ode(2.0);
    bad.step = 0.1;
    CHECK_THROWS_AS(ode_solve(bad, 0.5), ConfigError);
    CHECK_THROWS_AS(ode_solve(allen_cahn_ode(2.0), 0.6), ConfigError);
}

TEST_CASE("dense ODE solution interpolates the RK4 solution") {
    const OdeSolution sol(allen_cahn_ode(2.0));
    for (double t : {0.0, 0.0123, 0.2501, 0.5}) CHECK(std::abs(sol(t) - allen_cahn_closed_form(2.0, t)) < 1e-8);
    CHECK(sol.nodes().front() == 2.0);
}

TEST_CASE("FD with constant datum matches the ODE at interior points") {
    for (auto boundary : {Boundary::Neumann, Boundary::Periodic}) {
        FdOracle1d fd;
        fd.boundary = boundary;
        const auto sol = fd_solve_1d(fd_problem(constant_datum(2.0)), fd, kTimes);
        REQUIRE(sol.values.size() == 5);
        for (std::size_t i = 0; i < sol.times.size(); ++i) {
            const double y = allen_cahn_closed_form(2.0, sol.times[i]);
            for (std::size_t j = 1; j + 1 < sol.grid.size(); ++j) REQUIRE(std::abs(sol.values[i][j] - y) < 1e-6);
        }
        CHECK(sol.refinement_change < fd.refinement_tolerance);
    }
}

TEST_CASE("FD with zero datum stays zero") {
    const auto sol = fd_solve_1d(fd_problem(constant_datum(0.0)), FdOracle1d{}, kTimes);
    for (const auto& row : sol.values)
        for (double v : row) REQUIRE(v == 0.0);
}

TEST_CASE("FD preserves evenness with Neumann boundaries") {
    const auto sol = fd_solve_1d(fd_problem(gaussian_bump_datum(2.0)), FdOracle1d{}, kTimes);
    const std::size_t J = sol.grid.size();
    for (const auto& row : sol.values)
        for (std::size_t j = 0; j < J; ++j) REQUIRE(std::abs(row[j] - row[J - 1 - j]) < 1e-10);
    CHECK(grid_value(sol, 0, 0.0) == doctest::Approx(2.0));
}

TEST_CASE("FD diffusion matches the heat kernel for f = 0") {
    // u0 = exp(-x^2) under u_t = u_xx: u = (1 + 4t)^{-1/2} exp(-x^2 / (1 + 4t)).
    auto f = linear_reaction(0.0, 0.0);
    const auto p = make_problem(1, 0.5, Orientation::Forward, f, gaussian_bump_datum(1.0));
    const auto sol = fd_solve_1d(p, FdOracle1d{}, kTimes);
    for (double x : {0.0, 0.5, 1.5}) {
        const double exact = std::exp(-x * x / 3.0) / std::sqrt(3.0);
        CHECK(std::abs(grid_value(sol, 4, x) - exact) < 1e-4);
    }
}

TEST_CASE("FD rejects unsupported problems and unstable steps") {
    CHECK_THROWS_AS(fd_solve_1d(make_problem(2, 0.5, Orientation::Forward, allen_cahn(), constant_datum(1.0)),
                                FdOracle1d{}, kTimes),
                    ConfigError);
    CHECK_THROWS_AS(
        fd_solve_1d(make_problem(1, 0.5, Orientation::Backward, allen_cahn(), constant_datum(1.0)), FdOracle1d{}, kTimes),
        ConfigError);
    FdOracle1d fd;
    fd.dt = 0.5;
    CHECK_THROWS_AS(fd_solve_1d(fd_problem(constant_datum(20.0)), fd, kTimes), NumericError);
}

TEST_CASE("maximum principle check") {
    const auto sol = fd_solve_1d(fd_problem(constant_datum(2.0)), FdOracle1d{}, kTimes);
    const auto ok = max_principle_check(sol, 1.0, 2.0, 1e-6 + 1e-4);
    CHECK(ok.passed);
    CHECK(ok.bound.back() == doctest::Approx(apriori_sup_bound(1.0, 2.0, 0.5)));
    CHECK(ok.max_abs.back() == doctest::Approx(1.17517).epsilon(1e-5));

    const auto zero = fd_solve_1d(fd_problem(constant_datum(0.0)), FdOracle1d{}, kTimes);
    CHECK(max_principle_check(zero, 1.0, 0.0, 0.0).passed);

    auto broken = sol;
    broken.values[2][400] = 10.0;
    const auto bad = max_principle_check(broken, 1.0, 2.0, 1e-6 + 1e-4);
    CHECK_FALSE(bad.passed);
    CHECK(bad.worst_margin < 0.0);
}

TEST_CASE("Feynman-Kac residual of the exact ODE solution vanishes") {
    const auto p = fd_problem(constant_datum(2.0));
    const OdeSolution y(ode_oracle(p));
    const ReferenceSolution u = [&](double t, PointView) { return y(t); };
    const auto r = fixed_point_residual(u, p, 0.5, Point{0.0}, 100000, 1);
    CHECK(r.samples == 100000);
    CHECK(std::abs(r.estimate) < 3.0 * r.standard_error);

    const ReferenceSolution shifted = [&](double t, PointView) { return y(t) + 0.1; };
    const auto s = fixed_point_residual(shifted, p, 0.5, Point{0.0}, 100000, 1);
    CHECK(std::abs(s.estimate) > 3.0 * s.standard_error);
}

TEST_CASE("Feynman-Kac residual is exactly zero for the zero solution") {
    const auto p = fd_problem(constant_datum(0.0));
    const auto r = fixed_point_residual([](double, PointView) { return 0.0; }, p, 0.5, Point{0.0}, 1000, 3);
    CHECK(r.estimate == 0.0);
    CHECK(r.standard_error == 0.0);
}

TEST_CASE("Feynman-Kac residual standard error shrinks like samples^{-1/2}") {
    const auto p = fd_problem(constant_datum(2.0));
    const OdeSolution y(ode_oracle(p));
    const ReferenceSolution u = [&](double t, PointView) { return y(t); };
    const auto small = fixed_point_residual(u, p, 0.5, Point{0.0}, 10000, 5);
    const auto large = fixed_point_residual(u, p, 0.5, Point{0.0}, 1000000, 6);
    const double ratio = small.standard_error / large.standard_error;
    CHECK(ratio > 8.0);
    CHECK(ratio < 12.0);
}

TEST_CASE("Feynman-Kac residual in the backward orientation") {
    const auto p = make_problem(1, 0.5, Orientation::Backward, allen_cahn(), constant_datum(2.0));
    const OdeSolution y(ode_oracle(p));
    const ReferenceSolution u = [&](double t, PointView) { return y(0.5 - t); };
    const auto r = fixed_point_residual(u, p, 0.0, Point{0.0}, 100000, 2);
    CHECK(std::abs(r.estimate) < 3.0 * r.standard_error);
}

TEST_CASE("oracle CSV export") {
    std::ostringstream ode;
    const double times[] = {0.0, 0.5};
    write_ode_csv(ode, allen_cahn_ode(1.0), times);
    CHECK(ode.str() == "t,value\r\n0,1\r\n0.5,1\r\n");

    FdOracle1d fd;
    fd.points = 5;
    fd.half_width = 1.0;
    fd.self_check = false;
    const double t0[] = {0.0};
    std::ostringstream grid;
    write_grid_csv(grid, fd_solve_1d(fd_problem(constant_datum(0.0)), fd, t0));
    CHECK(grid.str() == "t,x,value\r\n0,-1,0\r\n0,-0.5,0\r\n0,0,0\r\n0,0.5,0\r\n0,1,0\r\n");
}
