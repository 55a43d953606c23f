#include <exception>
#include <mutex>

#include "mlp/error.hpp"
#include "mlp/estimator.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mlp {

namespace {

MlpParams repetition_params(const MlpParams& params, int j) {
    MlpParams p = params;
    p.root_node = params.root_node.prepended(j);
    return p;
}

void check_repetitions(int repetitions) {
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
}

}  // namespace

std::vector<EstimateResult> estimate_batch_serial(const PdeProblem& problem, const MlpParams& params, double t,
                                                  PointView x, int repetitions) {
    check_repetitions(repetitions);
    std::vector<EstimateResult> out;
    out.reserve(static_cast<std::size_t>(repetitions));
    for (int j = 0; j < repetitions; ++j) out.push_back(estimate(problem, repetition_params(params, j), t, x));
    return out;
}

std::vector<EstimateResult> estimate_batch(const PdeProblem& problem, const MlpParams& params, double t,
                                           PointView x, int repetitions, int worker_count) {
    check_repetitions(repetitions);
    // Surface argument errors on the calling thread.
    (void)estimate(problem, [&] {
        MlpParams probe = params;
        probe.levels = 0;
        return probe;
    }(), t, x);

    std::vector<EstimateResult> out(static_cast<std::size_t>(repetitions));
    std::exception_ptr failure;
    std::mutex failure_mutex;

#ifdef _OPENMP
    const int workers = worker_count > 0 ? worker_count : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
#endif
    for (int j = 0; j < repetitions; ++j) {
        try {
            out[static_cast<std::size_t>(j)] = estimate(problem, repetition_params(params, j), t, x);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    }
    (void)worker_count;
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace mlp
