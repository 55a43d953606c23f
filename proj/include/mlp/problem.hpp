#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mlp {

using Point = std::vector<double>;
using PointView = std::span<const double>;

/// Reaction term f(t, x, u) with the metadata the error analysis needs:
/// a local Lipschitz function L(r) on [-r, r] and a coercivity constant c
/// with v * f(t, x, v) <= c (1 + v^2).
struct Nonlinearity {
    std::string name;
    std::function<double(double t, PointView x, double u)> eval;
    std::function<double(double r)> lipschitz_local;
    double coercivity_c = 0.0;
    bool autonomous = false;
    // Set when f(., ., 0) does not depend on (t, x).
    std::optional<double> f_at_zero;

    double operator()(double t, PointView x, double u) const { return eval(t, x, u); }
};

/// Bounded datum: initial value in the forward orientation, terminal value
/// in the backward orientation. `sup_bound_kappa` is declared, not sampled.
struct DataFunction {
    std::string name;
    std::function<double(PointView x)> eval;
    double sup_bound_kappa = 0.0;
    std::optional<double> constant_value;

    double operator()(PointView x) const { return eval(x); }
};

/// Forward:  du/dt = Lap u + f(t, x, u), datum at t = 0.
/// Backward: du/dt + Lap u / 2 + f(t, x, u) = 0, datum at t = T.
enum class Orientation { Forward, Backward };

struct PdeProblem {
    int dimension = 1;
    double horizon = 1.0;
    Orientation orientation = Orientation::Forward;
    Nonlinearity nonlinearity;
    DataFunction data;

    // Throws ConfigError when dimension < 1, horizon <= 0 or callables are missing.
    void validate() const;
};

PdeProblem make_problem(int dimension, double horizon, Orientation orientation,
                        Nonlinearity nonlinearity, DataFunction data);

/// The equivalent problem in the other orientation: v(t, x) = u(T - t, sqrt(2) x).
/// Estimates of the original at (t, x) and of the result at (T - t, x / sqrt(2))
/// have the same law.
PdeProblem time_reversed(const PdeProblem& problem);

std::string to_string(Orientation o);
Orientation orientation_from_string(const std::string& s);

// -- truncation ---------------------------------------------------------------

inline double truncate_value(double u, double r) noexcept {
    return u > r ? r : (u < -r ? -r : u);
}

inline double eval_truncated_f(const Nonlinearity& nl, double t, PointView x, double u, double r) {
    return nl.eval(t, x, truncate_value(u, r));
}

// -- built-ins ----------------------------------------------------------------

/// f(u) = u - u^3, L(r) = 2 (1 + 2 r^2), c = 1.
Nonlinearity allen_cahn();
/// f(u) = a u with declared coercivity c >= max(a, 0).
Nonlinearity linear_reaction(double a, double c);
/// f(u) = sin(u), L(r) = 1, c = 1.
Nonlinearity sine_reaction();

DataFunction constant_datum(double value);
/// g(x) = kappa * cos(mean of x)
DataFunction cosine_mean_datum(double kappa);
/// g(x) = kappa * exp(-|x|^2 / d)
DataFunction gaussian_bump_datum(double kappa);

// -- truncation schedules -----------------------------------------------------

class TruncationSchedule {
public:
    TruncationSchedule(std::function<double(int)> raw, std::optional<double> floor = std::nullopt);

    double radius_at(int level) const;
    std::optional<double> floor() const { return floor_; }
    TruncationSchedule with_floor(double floor) const;

private:
    std::function<double(int)> raw_;
    std::optional<double> floor_;
};

/// r_n = ln(1 + ln(max(n, 2))).
TruncationSchedule default_schedule();

/// Finite-window proxy for the asymptotic admissibility of a schedule:
/// L(r_n) / ln(n) nonincreasing and r_n nondecreasing on [2, n_max].
/// A pass here is evidence, not a proof of the limit condition.
struct ScheduleDiagnostic {
    int window_first = 2;
    int window_last = 2;
    bool lipschitz_ratio_nonincreasing = true;
    bool radius_nondecreasing = true;
    bool passes() const { return lipschitz_ratio_nonincreasing && radius_nondecreasing; }
};

ScheduleDiagnostic check_schedule_window(const TruncationSchedule& schedule,
                                         const std::function<double(double)>& lipschitz_local,
                                         int n_max);

// -- sampled diagnostics --------------------------------------------------------

struct NonlinearitySpotCheck {
    std::size_t samples = 0;
    std::size_t lipschitz_violations = 0;
    std::size_t coercivity_violations = 0;
    std::size_t autonomy_violations = 0;
    std::size_t f_at_zero_violations = 0;
    bool ok() const {
        return lipschitz_violations == 0 && coercivity_violations == 0 && autonomy_violations == 0 &&
               f_at_zero_violations == 0;
    }
};

/// Spot-checks the declared metadata of `nl` on random (t, x, v, w) with
/// t in [0, horizon], x in [-2, 2]^d and v, w in [-radius, radius].
NonlinearitySpotCheck spot_check(const Nonlinearity& nl, int dimension, double horizon, double radius,
                                 std::size_t samples, std::uint64_t seed);

/// Largest observed difference quotient on [-r, r]. A diagnostic lower
/// estimate of L(r) for user-supplied f, never a certified constant.
double sampled_lipschitz_estimate(const Nonlinearity& nl, int dimension, double horizon, double r,
                                  std::size_t samples, std::uint64_t seed);

struct DataSpotCheck {
    std::size_t samples = 0;
    std::size_t bound_violations = 0;
    std::size_t constant_violations = 0;
    bool ok() const { return bound_violations == 0 && constant_violations == 0; }
};

DataSpotCheck spot_check(const DataFunction& data, int dimension, double spread, std::size_t samples,
                         std::uint64_t seed);

}  // namespace mlp
