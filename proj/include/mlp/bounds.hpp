#pragma once

#include <cstdint>
#include <functional>
#include <limits>

#include "mlp/problem.hpp"

namespace mlp {

/// Constants entering the closed-form error bound for an autonomous problem.
struct BoundConstants {
    double kappa = 0.0;   // sup |datum|
    double f0_abs = 0.0;  // |f(0)|, or a declared bound on the f(., ., 0) moment term
    double horizon = 1.0;
    double coercivity = 0.0;
    std::function<double(double)> lipschitz_local;

    void validate() const;
};

/// Constants of a problem. Requires f(., ., 0) to be a known constant unless
/// `f0_abs_override` is given.
BoundConstants bound_constants(const PdeProblem& problem, std::optional<double> f0_abs_override = std::nullopt);

/// L = 0, kappa = 1, f(0) = 0: the bound collapses to e^{M/2} M^{-n/2}.
BoundConstants lipschitz_free_surrogate(double horizon = 1.0);

/// e^{c t} (1 + kappa^2)^{1/2}: a-priori bound on sup |u(t, .)|.
double apriori_sup_bound(double coercivity, double kappa, double elapsed);

/// Smallest radius for which truncation provably leaves the solution untouched.
double rho_min(const PdeProblem& problem);
double rho_min(const BoundConstants& consts);

struct ErrorBound {
    double value = 0.0;
    double log_value = -std::numeric_limits<double>::infinity();  // ln(value), finite past under/overflow
    // False when r < rho_min: the number is still computed but is not a theorem.
    bool radius_admissible = true;
};

/// e^{L(r) T} [kappa + T |f(0)|] e^{M/2} (1 + 2 L(r) T)^n M^{-n/2}, evaluated in log space.
ErrorBound error_bound(const BoundConstants& consts, int levels, int branching, double radius);

/// General L^2 bound with user-supplied moments:
/// terminal_l2 = (E|g(X)|^2)^{1/2}, f_zero_moment = int_0^T E|f(s, X, 0)|^2 ds.
double error_bound_general(double terminal_l2, double f_zero_moment, double lipschitz, double horizon, int levels,
                           int branching);

/// Exact cost model C_{d,0,M} = 0,
/// C_{d,n,M} = (2d+1) M^n + sum_{l=1}^{n-1} M^{n-l} (d + 1 + C_{d,l,M} + C_{d,l-1,M}).
/// Throws NumericError on 64-bit overflow.
std::uint64_t cost_recursion(int dimension, int levels, int branching);

/// d (5M)^n.
double cost_bound(int dimension, int levels, int branching);

struct LevelSelection {
    int level = 1;            // N(eps)
    double bound_at_level = 0.0;
    int n_max = 0;
    bool tail_decreasing = false;  // bound strictly decreasing on [n_max - 2, n_max]
};

/// Least n <= n_max with error_bound(m, m, r_m) <= eps for every m in [n, n_max],
/// the capped stand-in for the supremum over all m >= n. Throws CapExceeded
/// (carrying the smallest bound seen) when no level qualifies or the tail of
/// the bound sequence is not decreasing at the cap.
LevelSelection select_levels(double epsilon, const BoundConstants& consts, const TruncationSchedule& schedule,
                             int n_max = 64);

/// sum_{n=1}^{N+K} C_{d,n,n}; throws NumericError on overflow.
std::uint64_t cumulative_cost(int dimension, int levels, int level_offset);

}  // namespace mlp
