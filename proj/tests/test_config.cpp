#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mlp/bounds.hpp"
#include "mlp/config.hpp"
#include "mlp/error.hpp"

using namespace mlp;

TEST_CASE("empty text gives the defaults") {
    CHECK(parse_config("") == RunConfig{});
    CHECK(parse_config("# comment\n; another\n\n") == RunConfig{});
}

TEST_CASE("parse a full config") {
    const auto c = parse_config(R"(
[problem]
nonlinearity = linear
linear_a = -0.5
linear_c = 0
datum = gaussian_bump
kappa = 1.5
dimension = 10
horizon = 1
orientation = backward

[estimator]
levels = 3
branching = 2
radius = 4.5
seed = 18446744073709551615
repetitions = 50
time = 0.25
point = 0.1, 0.2

[converge]
levels = 1,2,3
oracle = value
oracle_value = 1.25

[sweep]
epsilons = 0.5, 0.25
constants = problem

[output]
path = out.csv
timing = false

[run]
threads = 3
)");
    CHECK(c.problem.nonlinearity == "linear");
    CHECK(c.problem.linear_a == -0.5);
    CHECK(c.problem.dimension == 10);
    CHECK(c.problem.orientation == Orientation::Backward);
    CHECK(c.estimator.branching == 2);
    CHECK(c.estimator.radius == "4.5");
    CHECK(c.estimator.seed == 18446744073709551615ULL);
    CHECK(c.estimator.time == 0.25);
    CHECK(c.estimator.point == std::vector<double>{0.1, 0.2});
    CHECK(c.converge.levels == std::vector<int>{1, 2, 3});
    CHECK(c.converge.oracle_value == 1.25);
    CHECK(c.sweep.epsilons == std::vector<double>{0.5, 0.25});
    CHECK(c.output.path == "out.csv");
    CHECK_FALSE(c.output.timing);
    CHECK(c.threads == 3);
}

TEST_CASE("serialize then parse round-trips") {
    RunConfig c;
    CHECK(parse_config(serialize_config(c)) == c);
    c.problem.horizon = 0.1 + 0.2;
    c.problem.orientation = Orientation::Backward;
    c.estimator.schedule_floor = 1.0 / 3.0;
    c.estimator.time = 0.3;
    c.estimator.point = {1e-300, -2.5};
    c.converge.oracle_value = std::nextafter(1.0, 2.0);
    c.sweep.epsilons = {1.0 / 7.0};
    c.output.path = "a b.csv";
    c.output.timing = false;
    c.threads = 2;
    CHECK(parse_config(serialize_config(c)) == c);
}

TEST_CASE("malformed input is rejected") {
    CHECK_THROWS_AS(parse_config("[nope]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[problem]\ncolour = red\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("levels = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[problem\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[problem]\ndimension\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[problem]\ndimension = 2\ndimension = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[problem]\ndimension = two\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[problem]\ndimension = 2.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[problem]\nhorizon = 1x\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[problem]\nnonlinearity = burgers\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[estimator]\nradius = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[estimator]\nseed = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[output]\ntiming = maybe\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[converge]\nlevels = 1,,2\n"), ConfigError);
}

TEST_CASE("error messages carry the line number") {
    try {
        parse_config("[problem]\n\ncolour = red\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("overrides") {
    RunConfig c;
    apply_override(c, "estimator.levels=5");
    apply_override(c, " problem.datum = cosine_mean ");
    CHECK(c.estimator.levels == 5);
    CHECK(c.problem.datum == "cosine_mean");
    CHECK_THROWS_AS(apply_override(c, "levels=5"), ConfigError);
    CHECK_THROWS_AS(apply_override(c, "estimator.levels"), ConfigError);
    CHECK_THROWS_AS(apply_override(c, "estimator.colour=1"), ConfigError);
}

TEST_CASE("build_problem") {
    ProblemConfig pc;
    const auto p = build_problem(pc);
    CHECK(p.dimension == 1);
    CHECK(p.nonlinearity.name == allen_cahn().name);
    CHECK(p.data(Point{3.0}) == 2.0);
    CHECK(build_problem(pc, 7).dimension == 7);
    pc.nonlinearity = "linear";
    pc.linear_a = 2.0;
    pc.linear_c = 1.0;
    CHECK_THROWS_AS(build_problem(pc), ConfigError);
    pc.linear_c = 2.0;
    CHECK(build_problem(pc).nonlinearity(0.0, Point{0.0}, 1.5) == 3.0);
}

TEST_CASE("evaluation point and time") {
    EstimatorConfig ec;
    CHECK(evaluation_point(ec, 3) == Point{0.0, 0.0, 0.0});
    ec.point = {1.0, 2.0};
    CHECK(evaluation_point(ec, 2) == Point{1.0, 2.0});
    CHECK_THROWS_AS(evaluation_point(ec, 3), ConfigError);
    ProblemConfig pc;
    CHECK(evaluation_time(ec, pc) == pc.horizon);
    pc.orientation = Orientation::Backward;
    CHECK(evaluation_time(ec, pc) == 0.0);
    ec.time = 0.1;
    CHECK(evaluation_time(ec, pc) == 0.1);
}

TEST_CASE("radius rules") {
    EstimatorConfig ec;
    const auto p = build_problem(ProblemConfig{});
    const double rmin = rho_min(p);
    CHECK(resolve_radius(ec, p, 4) == rmin);
    ec.radius = "rho_min";
    CHECK(resolve_radius(ec, p, 4) == rmin);
    ec.radius = "schedule";
    CHECK(resolve_radius(ec, p, 4) == doctest::Approx(std::log(1.0 + std::log(4.0))));
    ec.schedule_floor = 5.0;
    CHECK(resolve_radius(ec, p, 4) == 5.0);
    ec.radius = "auto";
    CHECK(resolve_radius(ec, p, 4) == 5.0);
    ec.radius = "2.5";
    CHECK(resolve_radius(ec, p, 4) == 2.5);
}
