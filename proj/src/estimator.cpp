#include "mlp/estimator.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mlp/error.hpp"

namespace mlp {

namespace {

// Level sums longer than this use compensated summation.
constexpr std::uint64_t kCompensatedThreshold = 100'000;

class LevelSum {
public:
    explicit LevelSum(std::uint64_t count) : compensated_(count > kCompensatedThreshold) {}

    void add(double v) noexcept {
        if (!compensated_) {
            sum_ += v;
            return;
        }
        const double y = v - carry_;
        const double t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const noexcept { return sum_; }

private:
    bool compensated_;
    double sum_ = 0.0;
    double carry_ = 0.0;
};

class Recursion {
public:
    Recursion(const PdeProblem& problem, const MlpParams& params, EstimateTrace* trace)
        : problem_(problem),
          nl_(problem.nonlinearity),
          forward_(problem.orientation == Orientation::Forward),
          variance_scale_(forward_ ? 2.0 : 1.0),
          horizon_(problem.horizon),
          branching_(params.branching),
          radius_(params.truncation_radius),
          trace_(trace),
          buffers_(static_cast<std::size_t>(params.levels) + 1, Point(static_cast<std::size_t>(problem.dimension))) {
        if (trace_) path_ = params.root_node.path();
    }

    double run(StreamNode node, int level, double t, PointView x, std::size_t depth) {
        if (level == 0) return 0.0;

        // Length of the time interval the datum and the time integral live on.
        const double span = forward_ ? t : horizon_ - t;
        std::span<double> sample(buffers_[depth]);
        const std::size_t d = sample.size();

        const std::uint64_t base = sample_count(branching_, level);
        LevelSum base_sum(base);
        for (std::uint64_t m = 1; m <= base; ++m) {
            const auto im = static_cast<std::int64_t>(m);
            brownian_point_into(node.child(0, -im).key(), x, variance_scale_, span, sample);
            tally_.gaussian_scalars += d;
            double term = problem_.data.eval(sample);
            ++tally_.data_evals;
            if (nl_.f_at_zero) {
                term += span * *nl_.f_at_zero;
            } else {
                const std::uint64_t key = node.child(0, im).key();
                const auto [s, elapsed] = sample_time(key, t);
                brownian_point_into(key, x, variance_scale_, elapsed, sample);
                tally_.uniforms += 1;
                tally_.gaussian_scalars += d;
                term += span * nl_.eval(s, sample, 0.0);
                ++tally_.f_evals;
            }
            base_sum.add(term);
        }
        double value = base_sum.value() / static_cast<double>(base);

        for (int k = 1; k < level; ++k) {
            const std::uint64_t count = sample_count(branching_, level - k);
            LevelSum correction(count);
            for (std::uint64_t m = 1; m <= count; ++m) {
                const auto im = static_cast<std::int64_t>(m);
                const StreamNode draw_node = node.child(k, im);
                const std::uint64_t key = draw_node.key();
                const auto [s, elapsed] = sample_time(key, t);
                brownian_point_into(key, x, variance_scale_, elapsed, sample);
                tally_.uniforms += 1;
                tally_.gaussian_scalars += d;

                // Both levels see the same (s, sample) pair drawn at node (theta, k, m).
                const double fine = recurse(draw_node, k, im, k, s, sample, depth);
                const double coarse = recurse(node.child(-k, im), -k, im, k - 1, s, sample, depth);
                correction.add(eval_truncated_f(nl_, s, sample, fine, radius_) -
                               eval_truncated_f(nl_, s, sample, coarse, radius_));
                tally_.f_evals += 2;
            }
            value += span / static_cast<double>(count) * correction.value();
        }
        return value;
    }

    const CostTally& tally() const noexcept { return tally_; }

private:
    struct TimeSample {
        double time;
        double elapsed;
    };

    // Forward: s = t U, the Brownian point lives at elapsed t - s.
    // Backward: s = t + (T - t) U, elapsed s - t.
    TimeSample sample_time(std::uint64_t key, double t) const noexcept {
        const double u = uniform_at(key, kUniformSlot);
        if (forward_) {
            const double s = t * u;
            return {s, t - s};
        }
        const double s = t + (horizon_ - t) * u;
        return {s, s - t};
    }

    double recurse(StreamNode child, std::int64_t k_index, std::int64_t m, int level, double s, PointView at,
                   std::size_t depth) {
        if (!trace_) return run(child, level, s, at, depth + 1);

        path_.push_back(k_index);
        path_.push_back(m);
        if (trace_->record_calls) trace_->calls.push_back({NodeId(path_), level, s, Point(at.begin(), at.end())});
        const double v = run(child, level, s, at, depth + 1);
        path_.resize(path_.size() - 2);
        trace_->max_abs_intermediate = std::max(trace_->max_abs_intermediate, std::abs(v));
        return v;
    }

    const PdeProblem& problem_;
    const Nonlinearity& nl_;
    bool forward_;
    double variance_scale_;
    double horizon_;
    int branching_;
    double radius_;
    EstimateTrace* trace_;
    std::vector<Point> buffers_;
    std::vector<std::int64_t> path_;
    CostTally tally_;
};

void check_inputs(const PdeProblem& problem, const MlpParams& params, double t, PointView x) {
    problem.validate();
    params.validate();
    if (!(t >= 0.0 && t <= problem.horizon))
        throw ConfigError("evaluation time " + std::to_string(t) + " outside [0, T]");
    if (x.size() != static_cast<std::size_t>(problem.dimension))
        throw ConfigError("point has dimension " + std::to_string(x.size()) + ", problem has " +
                          std::to_string(problem.dimension));
    // Fails early on unrepresentable sample counts.
    (void)sample_count(params.branching, params.levels);
}

}  // namespace

void MlpParams::validate() const {
    if (levels < 0) throw ConfigError("levels must be >= 0");
    if (branching < 1) throw ConfigError("branching must be >= 1");
    if (!(truncation_radius > 0.0)) throw ConfigError("truncation radius must be > 0");
}

std::uint64_t sample_count(int branching, int exponent) {
    constexpr std::uint64_t limit = std::uint64_t{1} << 53;
    std::uint64_t v = 1;
    for (int i = 0; i < exponent; ++i) {
        if (v > limit / static_cast<std::uint64_t>(branching))
            throw NumericError("M^n = " + std::to_string(branching) + "^" + std::to_string(exponent) +
                               " is too large");
        v *= static_cast<std::uint64_t>(branching);
    }
    return v;
}

EstimateResult estimate(const PdeProblem& problem, const MlpParams& params, double t, PointView x,
                        EstimateTrace* trace) {
    check_inputs(problem, params, t, x);
    Recursion rec(problem, params, trace);
    const double v = rec.run(stream_node(params.seed, params.root_node), params.levels, t, x, 0);
    return {v, rec.tally()};
}

EstimateResult estimate_forward(const PdeProblem& problem, const MlpParams& params, double t, PointView x,
                                EstimateTrace* trace) {
    if (problem.orientation != Orientation::Forward) throw ConfigError("estimate_forward needs a forward problem");
    return estimate(problem, params, t, x, trace);
}

EstimateResult estimate_backward(const PdeProblem& problem, const MlpParams& params, double t, PointView x,
                                 EstimateTrace* trace) {
    if (problem.orientation != Orientation::Backward) throw ConfigError("estimate_backward needs a backward problem");
    return estimate(problem, params, t, x, trace);
}

}  // namespace mlp
