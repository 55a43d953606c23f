#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "mlp/problem.hpp"

namespace mlp {

// -- ODE reduction ----------------------------------------------------------------
//
// With a spatially constant datum and autonomous f the PDE solution is
// u(t, x) = y(t), y' = f(y), y(0) = u0.

struct OdeOracle {
    std::function<double(double)> f;
    double u0 = 0.0;
    double horizon = 1.0;
    double step = 0.01;  // must satisfy step <= horizon / 100
    double tolerance = 1e-10;  // step-doubling agreement required at the end point
};

OdeOracle ode_oracle(const PdeProblem& problem);

/// y(t) by classical RK4. The step is halved until RK4 with h and h/2 agree to
/// `tolerance` at t. Throws NumericError on blow-up (|y| > 1e10).
double ode_solve(const OdeOracle& oracle, double t);

/// Dense RK4 solution on [0, T] with cubic Hermite interpolation between nodes.
class OdeSolution {
public:
    explicit OdeSolution(const OdeOracle& oracle);

    double operator()(double t) const;
    double horizon() const noexcept { return horizon_; }
    double step() const noexcept { return step_; }
    const std::vector<double>& nodes() const noexcept { return values_; }

private:
    std::function<double(double)> f_;
    double horizon_;
    double step_;
    std::vector<double> values_;
    std::vector<double> slopes_;
};

/// y(t) = u0 e^t (1 - u0^2 + u0^2 e^{2t})^{-1/2}, the exact solution of y' = y - y^3.
double allen_cahn_closed_form(double u0, double t);

// -- 1-D finite differences ----------------------------------------------------------

enum class Boundary { Neumann, Periodic };

/// Strang splitting on [-half_width, half_width]: half a reaction step by
/// explicit RK4 at each node, a Crank-Nicolson step of du/dt = u_xx, another
/// half reaction step.
struct FdOracle1d {
    double half_width = 8.0;
    int points = 801;
    double dt = 1e-3;
    Boundary boundary = Boundary::Neumann;
    // Max change tolerated when the grid is refined (2x points, dt / 2).
    double refinement_tolerance = 1e-4;
    bool self_check = true;
};

struct GridSolution {
    std::vector<double> grid;
    std::vector<double> times;
    std::vector<std::vector<double>> values;  // values[i] = u(times[i], grid)
    double refinement_change = 0.0;           // 0 when the self-check is disabled
};

/// Forward problem with d = 1. Throws NumericError on instability or a failed
/// refinement check, ConfigError on invalid configuration.
GridSolution fd_solve_1d(const PdeProblem& problem, const FdOracle1d& oracle, std::span<const double> times);

/// Linear interpolation of the stored grid values at time index `i`.
double grid_value(const GridSolution& solution, std::size_t time_index, double x);

// -- a-priori bound check ---------------------------------------------------------------

struct MaxPrincipleReport {
    bool passed = true;
    std::vector<double> max_abs;  // per ladder time
    std::vector<double> bound;    // e^{ct} (1 + kappa^2)^{1/2}
    double worst_margin = 0.0;    // min over times of bound + tolerance - max_abs
};

MaxPrincipleReport max_principle_check(const GridSolution& solution, double coercivity, double kappa,
                                       double tolerance);

// -- Feynman-Kac residual ------------------------------------------------------------------

using ReferenceSolution = std::function<double(double t, PointView x)>;

struct ResidualEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
    std::size_t samples = 0;
};

/// Monte Carlo estimate of
///   u(t, x) - E[u(0, X_{0,t,x}) + t f(R, X_{R,t,x}, u(R, X_{R,t,x}))]
/// (forward orientation; the backward one uses the terminal datum time T and
/// span T - t). The time integral is replaced by one uniform time R per sample.
ResidualEstimate fixed_point_residual(const ReferenceSolution& u_ref, const PdeProblem& problem, double t,
                                      PointView x, std::size_t samples, std::uint64_t seed);

// -- export ---------------------------------------------------------------------------------

/// Columns t,x,value.
void write_grid_csv(std::ostream& out, const GridSolution& solution);
/// Columns t,value.
void write_ode_csv(std::ostream& out, const OdeOracle& oracle, std::span<const double> times);

}  // namespace mlp
