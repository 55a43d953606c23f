#include "mlp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mlp/error.hpp"

namespace mlp {

namespace {

// Relative slack for floating-point comparisons in the spot checks.
constexpr double kSlack = 1e-12;

Point scaled(PointView x, double factor) {
    Point y(x.begin(), x.end());
    for (auto& v : y) v *= factor;
    return y;
}

}  // namespace

void PdeProblem::validate() const {
    if (dimension < 1) throw ConfigError("dimension must be >= 1");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon must be a positive finite number");
    if (!nonlinearity.eval || !nonlinearity.lipschitz_local)
        throw ConfigError("nonlinearity '" + nonlinearity.name + "' is missing eval or lipschitz_local");
    if (!(nonlinearity.coercivity_c >= 0.0)) throw ConfigError("coercivity constant must be >= 0");
    if (!data.eval) throw ConfigError("data function '" + data.name + "' is missing eval");
    if (!(data.sup_bound_kappa >= 0.0)) throw ConfigError("kappa must be >= 0");
}

PdeProblem make_problem(int dimension, double horizon, Orientation orientation, Nonlinearity nonlinearity,
                        DataFunction data) {
    PdeProblem p{dimension, horizon, orientation, std::move(nonlinearity), std::move(data)};
    p.validate();
    return p;
}

PdeProblem time_reversed(const PdeProblem& problem) {
    problem.validate();
    const double T = problem.horizon;
    // Forward -> backward stretches space by sqrt(2); the inverse shrinks it.
    const double space = problem.orientation == Orientation::Forward ? std::numbers::sqrt2 : 1.0 / std::numbers::sqrt2;

    PdeProblem out = problem;
    out.orientation =
        problem.orientation == Orientation::Forward ? Orientation::Backward : Orientation::Forward;

    auto f = problem.nonlinearity.eval;
    if (problem.nonlinearity.autonomous) {
        out.nonlinearity.eval = f;
    } else {
        out.nonlinearity.eval = [f, T, space](double t, PointView x, double u) {
            const Point y = scaled(x, space);
            return f(T - t, y, u);
        };
    }
    out.nonlinearity.name = problem.nonlinearity.name + "~reversed";

    if (!problem.data.constant_value) {
        auto g = problem.data.eval;
        out.data.eval = [g, space](PointView x) {
            const Point y = scaled(x, space);
            return g(y);
        };
    }
    out.data.name = problem.data.name + "~reversed";
    return out;
}

std::string to_string(Orientation o) { return o == Orientation::Forward ? "forward" : "backward"; }

Orientation orientation_from_string(const std::string& s) {
    if (s == "forward") return Orientation::Forward;
    if (s == "backward") return Orientation::Backward;
    throw ConfigError("unknown orientation '" + s + "' (expected forward or backward)");
}

// -- built-ins ----------------------------------------------------------------

Nonlinearity allen_cahn() {
    Nonlinearity nl;
    nl.name = "allen_cahn";
    nl.eval = [](double, PointView, double u) { return u - u * u * u; };
    // |f(v) - f(w)| <= 2 (1 + |v|^2 + |w|^2) |v - w|
    nl.lipschitz_local = [](double r) { return 2.0 * (1.0 + 2.0 * r * r); };
    nl.coercivity_c = 1.0;
    nl.autonomous = true;
    nl.f_at_zero = 0.0;
    return nl;
}

Nonlinearity linear_reaction(double a, double c) {
    if (!std::isfinite(a)) throw ConfigError("linear: coefficient must be finite");
    if (!(c >= 0.0) || a > c)
        throw ConfigError("linear: requires 0 <= c and a <= c (v * a v <= c (1 + v^2))");
    Nonlinearity nl;
    nl.name = "linear";
    nl.eval = [a](double, PointView, double u) { return a * u; };
    nl.lipschitz_local = [a](double) { return std::abs(a); };
    nl.coercivity_c = c;
    nl.autonomous = true;
    nl.f_at_zero = 0.0;
    return nl;
}

Nonlinearity sine_reaction() {
    Nonlinearity nl;
    nl.name = "sine";
    nl.eval = [](double, PointView, double u) { return std::sin(u); };
    nl.lipschitz_local = [](double) { return 1.0; };
    nl.coercivity_c = 1.0;
    nl.autonomous = true;
    nl.f_at_zero = 0.0;
    return nl;
}

DataFunction constant_datum(double value) {
    if (!std::isfinite(value)) throw ConfigError("constant datum must be finite");
    DataFunction g;
    g.name = "constant";
    g.eval = [value](PointView) { return value; };
    g.sup_bound_kappa = std::abs(value);
    g.constant_value = value;
    return g;
}

DataFunction cosine_mean_datum(double kappa) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ConfigError("cosine_mean: kappa must be >= 0");
    DataFunction g;
    g.name = "cosine_mean";
    g.eval = [kappa](PointView x) {
        double s = 0.0;
        for (double v : x) s += v;
        return kappa * std::cos(s / static_cast<double>(x.size()));
    };
    g.sup_bound_kappa = kappa;
    return g;
}

DataFunction gaussian_bump_datum(double kappa) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ConfigError("gaussian_bump: kappa must be >= 0");
    DataFunction g;
    g.name = "gaussian_bump";
    g.eval = [kappa](PointView x) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return kappa * std::exp(-s / static_cast<double>(x.size()));
    };
    g.sup_bound_kappa = kappa;
    return g;
}

// -- schedules ----------------------------------------------------------------

TruncationSchedule::TruncationSchedule(std::function<double(int)> raw, std::optional<double> floor)
    : raw_(std::move(raw)), floor_(floor) {
    if (!raw_) throw ConfigError("truncation schedule needs a radius function");
    if (floor_ && !(*floor_ >= 0.0)) throw ConfigError("schedule floor must be >= 0");
}

double TruncationSchedule::radius_at(int level) const {
    const double r = raw_(level);
    return floor_ ? std::max(r, *floor_) : r;
}

TruncationSchedule TruncationSchedule::with_floor(double floor) const { return TruncationSchedule(raw_, floor); }

TruncationSchedule default_schedule() {
    return TruncationSchedule([](int n) { return std::log1p(std::log(static_cast<double>(std::max(n, 2)))); });
}

ScheduleDiagnostic check_schedule_window(const TruncationSchedule& schedule,
                                         const std::function<double(double)>& lipschitz_local, int n_max) {
    ScheduleDiagnostic diag;
    diag.window_last = std::max(n_max, 2);
    double prev_ratio = 0.0;
    double prev_radius = 0.0;
    for (int n = 2; n <= diag.window_last; ++n) {
        const double r = schedule.radius_at(n);
        const double ratio = lipschitz_local(r) / std::log(static_cast<double>(n));
        if (n > 2) {
            if (ratio > prev_ratio * (1.0 + kSlack)) diag.lipschitz_ratio_nonincreasing = false;
            if (r < prev_radius * (1.0 - kSlack)) diag.radius_nondecreasing = false;
        }
        prev_ratio = ratio;
        prev_radius = r;
    }
    return diag;
}

// -- diagnostics --------------------------------------------------------------

NonlinearitySpotCheck spot_check(const Nonlinearity& nl, int dimension, double horizon, double radius,
                                 std::size_t samples, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw_point = [&] {
        Point x(static_cast<std::size_t>(dimension));
        for (auto& v : x) v = -2.0 + 4.0 * unit(gen);
        return x;
    };

    NonlinearitySpotCheck out;
    out.samples = samples;
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = horizon * unit(gen);
        const Point x = draw_point();
        const double v = radius * (2.0 * unit(gen) - 1.0);
        const double w = radius * (2.0 * unit(gen) - 1.0);
        const double fv = nl.eval(t, x, v);
        const double fw = nl.eval(t, x, w);

        const double lip = nl.lipschitz_local(radius);
        if (std::abs(fv - fw) > lip * std::abs(v - w) * (1.0 + kSlack) + kSlack) ++out.lipschitz_violations;

        // Coercivity is global; probe well outside the truncation radius too.
        const double big = 10.0 * radius * (2.0 * unit(gen) - 1.0);
        for (double u : {v, big}) {
            const double lhs = u * nl.eval(t, x, u);
            const double rhs = nl.coercivity_c * (1.0 + u * u);
            if (lhs > rhs * (1.0 + kSlack) + kSlack) ++out.coercivity_violations;
        }

        if (nl.autonomous) {
            const double t2 = horizon * unit(gen);
            const Point x2 = draw_point();
            if (nl.eval(t2, x2, v) != fv) ++out.autonomy_violations;
        }
        if (nl.f_at_zero && nl.eval(t, x, 0.0) != *nl.f_at_zero) ++out.f_at_zero_violations;
    }
    return out;
}

double sampled_lipschitz_estimate(const Nonlinearity& nl, int dimension, double horizon, double r,
                                  std::size_t samples, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double best = 0.0;
    Point x(static_cast<std::size_t>(dimension));
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = horizon * unit(gen);
        for (auto& v : x) v = -2.0 + 4.0 * unit(gen);
        const double v = r * (2.0 * unit(gen) - 1.0);
        const double w = r * (2.0 * unit(gen) - 1.0);
        if (v == w) continue;
        best = std::max(best, std::abs(nl.eval(t, x, v) - nl.eval(t, x, w)) / std::abs(v - w));
    }
    return best;
}

DataSpotCheck spot_check(const DataFunction& data, int dimension, double spread, std::size_t samples,
                         std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, spread);
    DataSpotCheck out;
    out.samples = samples;
    Point x(static_cast<std::size_t>(dimension));
    for (std::size_t i = 0; i < samples; ++i) {
        for (auto& v : x) v = normal(gen);
        const double g = data.eval(x);
        if (std::abs(g) > data.sup_bound_kappa * (1.0 + kSlack)) ++out.bound_violations;
        if (data.constant_value && g != *data.constant_value) ++out.constant_violations;
    }
    return out;
}

}  // namespace mlp
