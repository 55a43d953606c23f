#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mlp/bounds.hpp"
#include "mlp/estimator.hpp"
#include "mlp/problem.hpp"

namespace mlp {

/// Streaming mean/variance (Welford) with exact-up-to-rounding merging.
class RunningStats {
public:
    void push(double x) noexcept;
    void merge(const RunningStats& other) noexcept;

    std::uint64_t count() const noexcept { return count_; }
    double mean() const noexcept { return mean_; }
    double sum_squared_deviations() const noexcept { return m2_; }
    /// Unbiased sample variance; 0 for fewer than two samples.
    double variance() const noexcept;
    /// 1/K normalisation.
    double population_variance() const noexcept;
    double standard_error() const noexcept;

private:
    std::uint64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// (K^{-1} sum_j (U_j - oracle)^2)^{1/2}
double rmse(std::span<const double> values, double oracle);

struct ConvergenceRow {
    int levels = 0;  // n (= M, except n = 0 which runs with M = 1)
    int branching = 1;
    double radius = 0.0;
    int repetitions = 0;
    double mean = 0.0;
    double bias = 0.0;
    double rmse = 0.0;
    double standard_error = 0.0;
    double error_bound = 0.0;
    bool radius_admissible = true;
    std::uint64_t gaussian_draws = 0;    // per realization
    std::uint64_t elementary_draws = 0;  // gaussians + uniforms, per realization
    std::uint64_t cost_model = 0;
    double cost_bound = 0.0;
    double wall_seconds = 0.0;  // not deterministic
};

struct ConvergenceSetup {
    std::vector<int> levels{1, 2, 3, 4, 5};
    int repetitions = 1000;
    std::uint64_t seed = 0;
    int workers = 0;
    // When unset, r = max(schedule(n), rho_min).
    std::optional<double> radius;
};

/// Diagonal runs n = M against a known solution value at (t, x).
std::vector<ConvergenceRow> rmse_vs_oracle(const PdeProblem& problem, double oracle_value, double t, PointView x,
                                           const TruncationSchedule& schedule, const ConvergenceSetup& setup);

/// Throws std::logic_error unless draws <= cost model <= d (5M)^n.
void verify_cost_chain(const ConvergenceRow& row, int dimension);

struct ScalingRow {
    int dimension = 1;
    std::uint64_t gaussian_draws = 0;
    std::uint64_t uniforms = 0;
    std::uint64_t cost_model = 0;
    double cost_bound = 0.0;
    double mean = 0.0;
    double wall_seconds = 0.0;
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    // Cost model predicted exactly from the first two dimensions.
    bool cost_model_affine = true;
    std::uint64_t cost_slope = 0;
    std::uint64_t cost_intercept = 0;
    double draws_fit_r2 = 1.0;  // least-squares fit of gaussian draws against d
};

struct ScalingSetup {
    std::vector<int> dimensions{1, 10, 100};
    int levels = 3;  // n = M
    int repetitions = 10;
    std::uint64_t seed = 0;
    int workers = 0;
    std::optional<double> radius;
};

/// `make_problem(d)` builds the d-dimensional instance; evaluation at (t, 0).
ScalingReport dimension_scaling(const std::function<PdeProblem(int)>& make_problem, double t,
                                const TruncationSchedule& schedule, const ScalingSetup& setup);

struct SweepRow {
    double epsilon = 0.0;
    int dimension = 1;
    int levels = 1;  // N(eps / d^p)
    std::uint64_t cumulative_cost = 0;
    double normalized_cost = 0.0;  // cost * eps^{2+delta} / d^{1 + p (2 + delta)}
};

struct SweepReport {
    std::vector<SweepRow> rows;
    double normalized_max = 0.0;
    double normalized_min = 0.0;
    double ratio() const { return normalized_max / normalized_min; }
};

struct SweepSetup {
    std::vector<double> epsilons{0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
    std::vector<int> dimensions{1};
    double delta = 1.0;
    double growth_p = 0.0;
    int level_offset = 0;  // K
    int n_max = 64;
};

SweepReport epsilon_sweep(const BoundConstants& consts, const TruncationSchedule& schedule, const SweepSetup& setup);

// CSV emission. Wall-time columns are last and can be omitted for byte-stable output.
void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRow> rows, bool with_timing = true);
void write_scaling_csv(std::ostream& out, std::span<const ScalingRow> rows, bool with_timing = true);
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace mlp
