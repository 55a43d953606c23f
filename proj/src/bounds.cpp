#include "mlp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mlp/csv.hpp"
#include "mlp/error.hpp"

namespace mlp {

namespace {

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw NumericError("cost model overflows 64-bit integers");
    return r;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw NumericError("cost model overflows 64-bit integers");
    return r;
}

void require_cost_args(int dimension, int levels, int branching) {
    if (dimension < 1) throw ConfigError("cost model: d must be >= 1");
    if (levels < 0) throw ConfigError("cost model: n must be >= 0");
    if (branching < 1) throw ConfigError("cost model: M must be >= 1");
}

}  // namespace

void BoundConstants::validate() const {
    if (!(kappa >= 0.0) || !(f0_abs >= 0.0) || !(coercivity >= 0.0))
        throw ConfigError("bound constants must be nonnegative");
    if (!(horizon > 0.0)) throw ConfigError("bound constants: T must be > 0");
    if (!lipschitz_local) throw ConfigError("bound constants: missing L(r)");
}

BoundConstants bound_constants(const PdeProblem& problem, std::optional<double> f0_abs_override) {
    problem.validate();
    BoundConstants c;
    c.kappa = problem.data.sup_bound_kappa;
    c.horizon = problem.horizon;
    c.coercivity = problem.nonlinearity.coercivity_c;
    c.lipschitz_local = problem.nonlinearity.lipschitz_local;
    if (f0_abs_override) {
        c.f0_abs = *f0_abs_override;
    } else if (problem.nonlinearity.f_at_zero) {
        c.f0_abs = std::abs(*problem.nonlinearity.f_at_zero);
    } else {
        throw ConfigError("f(., ., 0) is not constant; supply a bound on its moment term");
    }
    c.validate();
    return c;
}

BoundConstants lipschitz_free_surrogate(double horizon) {
    BoundConstants c;
    c.kappa = 1.0;
    c.f0_abs = 0.0;
    c.horizon = horizon;
    c.coercivity = 0.0;
    c.lipschitz_local = [](double) { return 0.0; };
    return c;
}

double apriori_sup_bound(double coercivity, double kappa, double elapsed) {
    if (!(coercivity >= 0.0) || !(kappa >= 0.0) || !(elapsed >= 0.0))
        throw ConfigError("apriori_sup_bound: arguments must be nonnegative");
    return std::exp(coercivity * elapsed) * std::sqrt(1.0 + kappa * kappa);
}

double rho_min(const PdeProblem& problem) {
    problem.validate();
    return apriori_sup_bound(problem.nonlinearity.coercivity_c, problem.data.sup_bound_kappa, problem.horizon);
}

double rho_min(const BoundConstants& consts) {
    return apriori_sup_bound(consts.coercivity, consts.kappa, consts.horizon);
}

ErrorBound error_bound(const BoundConstants& consts, int levels, int branching, double radius) {
    consts.validate();
    if (levels < 0 || branching < 1) throw ConfigError("error_bound: needs n >= 0 and M >= 1");
    if (!(radius > 0.0)) throw ConfigError("error_bound: radius must be > 0");

    ErrorBound out;
    out.radius_admissible = radius >= rho_min(consts);
    const double prefactor = consts.kappa + consts.horizon * consts.f0_abs;
    if (prefactor == 0.0) return out;

    const double lip = consts.lipschitz_local(radius);
    const double T = consts.horizon;
    const double n = levels;
    const double M = branching;
    out.log_value = lip * T + std::log(prefactor) + M / 2.0 + n * std::log1p(2.0 * lip * T) - n / 2.0 * std::log(M);
    out.value = std::exp(out.log_value);
    return out;
}

double error_bound_general(double terminal_l2, double f_zero_moment, double lipschitz, double horizon, int levels,
                           int branching) {
    if (!(terminal_l2 >= 0.0) || !(f_zero_moment >= 0.0) || !(lipschitz >= 0.0) || !(horizon > 0.0) ||
        levels < 0 || branching < 1)
        throw ConfigError("error_bound_general: invalid arguments");
    const double prefactor = terminal_l2 + std::sqrt(horizon) * std::sqrt(f_zero_moment);
    if (prefactor == 0.0) return 0.0;
    const double n = levels;
    const double M = branching;
    return std::exp(lipschitz * horizon + std::log(prefactor) + M / 2.0 + n * std::log1p(2.0 * lipschitz * horizon) -
                    n / 2.0 * std::log(M));
}

std::uint64_t cost_recursion(int dimension, int levels, int branching) {
    require_cost_args(dimension, levels, branching);
    const auto d = static_cast<std::uint64_t>(dimension);
    const auto M = static_cast<std::uint64_t>(branching);

    std::vector<std::uint64_t> power(static_cast<std::size_t>(levels) + 1, 1);  // M^j
    for (std::size_t j = 1; j < power.size(); ++j) power[j] = checked_mul(power[j - 1], M);

    std::vector<std::uint64_t> cost(static_cast<std::size_t>(levels) + 1, 0);
    for (int n = 1; n <= levels; ++n) {
        std::uint64_t c = checked_mul(checked_add(checked_mul(2, d), 1), power[static_cast<std::size_t>(n)]);
        for (int l = 1; l < n; ++l) {
            const std::uint64_t inner = checked_add(checked_add(d + 1, cost[static_cast<std::size_t>(l)]),
                                                    cost[static_cast<std::size_t>(l - 1)]);
            c = checked_add(c, checked_mul(power[static_cast<std::size_t>(n - l)], inner));
        }
        cost[static_cast<std::size_t>(n)] = c;
    }
    return cost.back();
}

double cost_bound(int dimension, int levels, int branching) {
    require_cost_args(dimension, levels, branching);
    return dimension * std::pow(5.0 * branching, levels);
}

LevelSelection select_levels(double epsilon, const BoundConstants& consts, const TruncationSchedule& schedule,
                             int n_max) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ConfigError("select_levels: epsilon must lie in (0, 1]");
    if (n_max < 3) throw ConfigError("select_levels: n_max must be >= 3");

    LevelSelection sel;
    sel.n_max = n_max;
    if (consts.kappa + consts.horizon * consts.f0_abs == 0.0) {
        sel.tail_decreasing = true;
        return sel;
    }

    // Compared in log space: the diagonal bound under- and overflows doubles long before the cap.
    std::vector<double> log_bound(static_cast<std::size_t>(n_max) + 1, 0.0);
    double best = std::numeric_limits<double>::infinity();
    int best_level = 1;
    for (int m = 1; m <= n_max; ++m) {
        log_bound[static_cast<std::size_t>(m)] = error_bound(consts, m, m, schedule.radius_at(m)).log_value;
        if (log_bound[static_cast<std::size_t>(m)] < best) {
            best = log_bound[static_cast<std::size_t>(m)];
            best_level = m;
        }
    }

    const auto at = [&](int m) { return log_bound[static_cast<std::size_t>(m)]; };
    const double log_eps = std::log(epsilon);
    sel.tail_decreasing = at(n_max - 2) > at(n_max - 1) && at(n_max - 1) > at(n_max);
    if (!sel.tail_decreasing || at(n_max) > log_eps)
        throw CapExceeded("no level <= " + std::to_string(n_max) + " reaches error bound " + format_real(epsilon) +
                              (sel.tail_decreasing ? "" : " (bound not decreasing at the cap)"),
                          std::exp(best), best_level);

    int n = n_max;
    while (n > 1 && at(n - 1) <= log_eps) --n;
    sel.level = n;
    sel.bound_at_level = std::exp(at(n));
    return sel;
}

std::uint64_t cumulative_cost(int dimension, int levels, int level_offset) {
    if (levels < 1) throw ConfigError("cumulative_cost: N must be >= 1");
    if (level_offset < 0) throw ConfigError("cumulative_cost: K must be >= 0");
    std::uint64_t total = 0;
    for (int n = 1; n <= levels + level_offset; ++n) total = checked_add(total, cost_recursion(dimension, n, n));
    return total;
}

}  // namespace mlp
