#include "mlp/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "mlp/csv.hpp"
#include "mlp/error.hpp"

namespace mlp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double default_radius(const PdeProblem& problem, const TruncationSchedule& schedule, int level,
                      const std::optional<double>& override_radius) {
    if (override_radius) return *override_radius;
    return std::max(schedule.radius_at(level), rho_min(problem));
}

}  // namespace

// -- RunningStats ---------------------------------------------------------------------------

void RunningStats::push(double x) noexcept {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& other) noexcept {
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double n = na + nb;
    const double delta = other.mean_ - mean_;
    mean_ += delta * nb / n;
    m2_ += other.m2_ + delta * delta * na * nb / n;
    count_ += other.count_;
}

double RunningStats::variance() const noexcept {
    return count_ < 2 ? 0.0 : m2_ / static_cast<double>(count_ - 1);
}

double RunningStats::population_variance() const noexcept {
    return count_ == 0 ? 0.0 : m2_ / static_cast<double>(count_);
}

double RunningStats::standard_error() const noexcept {
    return count_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(count_));
}

double rmse(std::span<const double> values, double oracle) {
    if (values.empty()) throw ConfigError("rmse of an empty sample");
    double s = 0.0;
    for (double v : values) s += (v - oracle) * (v - oracle);
    return std::sqrt(s / static_cast<double>(values.size()));
}

// -- convergence ------------------------------------------------------------------------------

void verify_cost_chain(const ConvergenceRow& row, int dimension) {
    if (row.levels == 0) {
        if (row.elementary_draws != 0 || row.cost_model != 0)
            throw std::logic_error("level 0 must not draw anything");
        return;
    }
    if (row.elementary_draws > row.cost_model)
        throw std::logic_error("measured draws exceed the cost model at n = " + std::to_string(row.levels));
    if (static_cast<double>(row.cost_model) > cost_bound(dimension, row.levels, row.branching))
        throw std::logic_error("cost model exceeds d (5M)^n at n = " + std::to_string(row.levels));
}

std::vector<ConvergenceRow> rmse_vs_oracle(const PdeProblem& problem, double oracle_value, double t, PointView x,
                                           const TruncationSchedule& schedule, const ConvergenceSetup& setup) {
    if (setup.repetitions < 2) throw ConfigError("rmse_vs_oracle: needs K >= 2 repetitions");
    // Without a constant f(., ., 0) the closed-form bound has no prefactor; report nan.
    std::optional<BoundConstants> consts;
    if (problem.nonlinearity.f_at_zero) consts = bound_constants(problem);
    std::vector<ConvergenceRow> rows;
    for (int n : setup.levels) {
        if (n < 0) throw ConfigError("levels must be >= 0");
        ConvergenceRow row;
        row.levels = n;
        row.branching = std::max(n, 1);
        row.radius = default_radius(problem, schedule, n, setup.radius);
        row.repetitions = setup.repetitions;

        MlpParams params;
        params.levels = n;
        params.branching = row.branching;
        params.truncation_radius = row.radius;
        params.seed = setup.seed;

        const auto start = Clock::now();
        const auto results = estimate_batch(problem, params, t, x, setup.repetitions, setup.workers);
        row.wall_seconds = seconds_since(start);

        RunningStats stats;
        std::vector<double> values;
        values.reserve(results.size());
        for (const auto& r : results) {
            stats.push(r.value);
            values.push_back(r.value);
            row.gaussian_draws = std::max(row.gaussian_draws, r.tally.gaussian_scalars);
            row.elementary_draws = std::max(row.elementary_draws, r.tally.elementary());
        }
        row.mean = stats.mean();
        row.bias = stats.mean() - oracle_value;
        row.standard_error = stats.standard_error();
        row.rmse = rmse(values, oracle_value);

        if (consts) {
            const auto bound = error_bound(*consts, n, row.branching, row.radius);
            row.error_bound = bound.value;
            row.radius_admissible = bound.radius_admissible;
        } else {
            row.error_bound = std::nan("");
            row.radius_admissible = row.radius >= rho_min(problem);
        }
        row.cost_model = cost_recursion(problem.dimension, n, row.branching);
        row.cost_bound = n == 0 ? 0.0 : cost_bound(problem.dimension, n, row.branching);
        verify_cost_chain(row, problem.dimension);
        rows.push_back(row);
    }
    return rows;
}

// -- dimension scaling ---------------------------------------------------------------------------

ScalingReport dimension_scaling(const std::function<PdeProblem(int)>& make_problem, double t,
                                const TruncationSchedule& schedule, const ScalingSetup& setup) {
    if (setup.dimensions.empty()) throw ConfigError("dimension_scaling: empty dimension list");
    if (setup.levels < 1) throw ConfigError("dimension_scaling: levels must be >= 1");
    if (!std::is_sorted(setup.dimensions.begin(), setup.dimensions.end(), std::less_equal<>()))
        throw ConfigError("dimension_scaling: dimensions must be strictly increasing");
    ScalingReport report;
    for (int d : setup.dimensions) {
        if (d < 1) throw ConfigError("dimension_scaling: dimensions must be >= 1");
        const PdeProblem problem = make_problem(d);
        if (problem.dimension != d) throw ConfigError("problem factory returned the wrong dimension");

        MlpParams params;
        params.levels = setup.levels;
        params.branching = setup.levels;
        params.truncation_radius = default_radius(problem, schedule, setup.levels, setup.radius);
        params.seed = setup.seed;
        const Point origin(static_cast<std::size_t>(d), 0.0);

        const auto start = Clock::now();
        const auto results = estimate_batch(problem, params, t, origin, setup.repetitions, setup.workers);
        ScalingRow row;
        row.wall_seconds = seconds_since(start);
        row.dimension = d;
        RunningStats stats;
        for (const auto& r : results) {
            stats.push(r.value);
            row.gaussian_draws = std::max(row.gaussian_draws, r.tally.gaussian_scalars);
            row.uniforms = std::max(row.uniforms, r.tally.uniforms);
        }
        row.mean = stats.mean();
        row.cost_model = cost_recursion(d, setup.levels, setup.levels);
        row.cost_bound = cost_bound(d, setup.levels, setup.levels);
        if (row.gaussian_draws + row.uniforms > row.cost_model)
            throw std::logic_error("measured draws exceed the cost model at d = " + std::to_string(d));
        report.rows.push_back(row);
    }

    const auto& rows = report.rows;
    if (rows.size() >= 2) {
        const auto dd = static_cast<std::uint64_t>(rows[1].dimension - rows[0].dimension);
        const std::uint64_t diff = rows[1].cost_model - rows[0].cost_model;
        report.cost_slope = diff / dd;
        report.cost_model_affine = diff % dd == 0;
        report.cost_intercept = rows[0].cost_model - report.cost_slope * static_cast<std::uint64_t>(rows[0].dimension);
        for (const auto& r : rows)
            if (report.cost_intercept + report.cost_slope * static_cast<std::uint64_t>(r.dimension) != r.cost_model)
                report.cost_model_affine = false;
    }

    // R^2 of draws ~ a d + b.
    if (rows.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double k = static_cast<double>(rows.size());
        for (const auto& r : rows) {
            const double xd = r.dimension;
            const double yd = static_cast<double>(r.gaussian_draws);
            sx += xd;
            sy += yd;
            sxx += xd * xd;
            sxy += xd * yd;
        }
        const double denom = k * sxx - sx * sx;
        if (denom != 0.0) {
            const double a = (k * sxy - sx * sy) / denom;
            const double b = (sy - a * sx) / k;
            const double ybar = sy / k;
            double ss_res = 0, ss_tot = 0;
            for (const auto& r : rows) {
                const double yd = static_cast<double>(r.gaussian_draws);
                ss_res += (yd - (a * r.dimension + b)) * (yd - (a * r.dimension + b));
                ss_tot += (yd - ybar) * (yd - ybar);
            }
            report.draws_fit_r2 = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
        }
    }
    return report;
}

// -- epsilon sweep -------------------------------------------------------------------------------

SweepReport epsilon_sweep(const BoundConstants& consts, const TruncationSchedule& schedule, const SweepSetup& setup) {
    if (!(setup.delta > 0.0)) throw ConfigError("epsilon_sweep: delta must be > 0");
    if (!(setup.growth_p >= 0.0)) throw ConfigError("epsilon_sweep: p must be >= 0");
    SweepReport report;
    report.normalized_max = -HUGE_VAL;
    report.normalized_min = HUGE_VAL;
    for (int d : setup.dimensions) {
        if (d < 1) throw ConfigError("epsilon_sweep: dimensions must be >= 1");
        const double dp = std::pow(static_cast<double>(d), setup.growth_p);
        for (double eps : setup.epsilons) {
            if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("epsilon_sweep: epsilon must lie in (0, 1]");
            SweepRow row;
            row.epsilon = eps;
            row.dimension = d;
            row.levels = select_levels(eps / dp, consts, schedule, setup.n_max).level;
            row.cumulative_cost = cumulative_cost(d, row.levels, setup.level_offset);
            row.normalized_cost = static_cast<double>(row.cumulative_cost) * std::pow(eps, 2.0 + setup.delta) /
                                  std::pow(static_cast<double>(d), 1.0 + setup.growth_p * (2.0 + setup.delta));
            report.normalized_max = std::max(report.normalized_max, row.normalized_cost);
            report.normalized_min = std::min(report.normalized_min, row.normalized_cost);
            report.rows.push_back(row);
        }
    }
    return report;
}

// -- CSV --------------------------------------------------------------------------------------------

void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRow> rows, bool with_timing) {
    CsvWriter csv(out);
    for (std::string_view h : {"n", "M", "radius", "K", "mean", "bias", "rmse", "standard_error", "error_bound",
                               "radius_admissible", "gaussian_draws", "elementary_draws", "cost_model", "cost_bound"})
        csv.field(h);
    if (with_timing) csv.field("wall_seconds");
    csv.end_row();
    for (const auto& r : rows) {
        csv.field(r.levels).field(r.branching).field(r.radius).field(r.repetitions).field(r.mean).field(r.bias)
            .field(r.rmse).field(r.standard_error).field(r.error_bound).field(r.radius_admissible)
            .field(r.gaussian_draws).field(r.elementary_draws).field(r.cost_model).field(r.cost_bound);
        if (with_timing) csv.field(r.wall_seconds);
        csv.end_row();
    }
}

void write_scaling_csv(std::ostream& out, std::span<const ScalingRow> rows, bool with_timing) {
    CsvWriter csv(out);
    for (std::string_view h : {"d", "gaussian_draws", "uniforms", "cost_model", "cost_bound", "mean"}) csv.field(h);
    if (with_timing) csv.field("wall_seconds");
    csv.end_row();
    for (const auto& r : rows) {
        csv.field(r.dimension).field(r.gaussian_draws).field(r.uniforms).field(r.cost_model).field(r.cost_bound)
            .field(r.mean);
        if (with_timing) csv.field(r.wall_seconds);
        csv.end_row();
    }
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    CsvWriter csv(out);
    csv.header({"epsilon", "d", "N", "cumulative_cost", "normalized_cost"});
    for (const auto& r : rows)
        csv.field(r.epsilon).field(r.dimension).field(r.levels).field(r.cumulative_cost).field(r.normalized_cost)
            .end_row();
}

}  // namespace mlp
