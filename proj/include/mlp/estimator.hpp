#pragma once

#include <cstdint>
#include <vector>

#include "mlp/problem.hpp"
#include "mlp/randomness.hpp"

namespace mlp {

struct MlpParams {
    int levels = 0;        // n
    int branching = 1;     // M
    double truncation_radius = 1.0;  // r
    std::uint64_t seed = 0;
    NodeId root_node;

    void validate() const;
};

/// Draws and evaluations actually performed for one or more realizations.
struct CostTally {
    std::uint64_t gaussian_scalars = 0;
    std::uint64_t uniforms = 0;
    std::uint64_t f_evals = 0;
    std::uint64_t data_evals = 0;

    /// Scalar random variables consumed; the quantity the cost model bounds.
    std::uint64_t elementary() const noexcept { return gaussian_scalars + uniforms; }

    CostTally& operator+=(const CostTally& o) noexcept {
        gaussian_scalars += o.gaussian_scalars;
        uniforms += o.uniforms;
        f_evals += o.f_evals;
        data_evals += o.data_evals;
        return *this;
    }
    friend bool operator==(const CostTally&, const CostTally&) = default;
};

struct EstimateResult {
    double value = 0.0;
    CostTally tally;
};

/// One recursive evaluation U^{root}_{level}(t, x) issued from a correction term.
struct RecursiveCall {
    NodeId root;
    int level = 0;
    double t = 0.0;
    Point x;
};

/// Optional instrumentation. Tracing slows the estimator down and is meant
/// for tests and diagnostics.
struct EstimateTrace {
    bool record_calls = false;
    std::vector<RecursiveCall> calls;
    // max |U| over every recursively computed value fed into the truncated f.
    double max_abs_intermediate = 0.0;
};

/// One realization of the truncated MLP estimator U^{root}_{n,M,r}(t, x) in
/// the problem's orientation. Throws ConfigError for t outside [0, T] or a
/// point of the wrong dimension.
EstimateResult estimate(const PdeProblem& problem, const MlpParams& params, double t, PointView x,
                        EstimateTrace* trace = nullptr);

/// As `estimate`, additionally requiring the forward orientation.
EstimateResult estimate_forward(const PdeProblem& problem, const MlpParams& params, double t, PointView x,
                                EstimateTrace* trace = nullptr);
/// As `estimate`, additionally requiring the backward orientation.
EstimateResult estimate_backward(const PdeProblem& problem, const MlpParams& params, double t, PointView x,
                                 EstimateTrace* trace = nullptr);

/// K independent realizations; repetition j is rooted at [j] ++ params.root_node.
/// OpenMP-parallel over repetitions. worker_count <= 0 uses the OpenMP default.
/// Output is bit-identical for every worker count.
std::vector<EstimateResult> estimate_batch(const PdeProblem& problem, const MlpParams& params, double t,
                                           PointView x, int repetitions, int worker_count);

/// Sequential reference for estimate_batch.
std::vector<EstimateResult> estimate_batch_serial(const PdeProblem& problem, const MlpParams& params, double t,
                                                  PointView x, int repetitions);

/// M^n as an exact integer; throws NumericError beyond 2^53.
std::uint64_t sample_count(int branching, int exponent);

}  // namespace mlp
