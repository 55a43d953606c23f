#include "mlp/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "mlp/csv.hpp"
#include "mlp/error.hpp"
#include "mlp/randomness.hpp"

namespace mlp {

namespace {

constexpr double kBlowUp = 1e10;
constexpr int kMaxHalvings = 20;

double rk4_step(const std::function<double(double)>& f, double y, double h) {
    const double k1 = f(y);
    const double k2 = f(y + 0.5 * h * k1);
    const double k3 = f(y + 0.5 * h * k2);
    const double k4 = f(y + h * k3);
    return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double rk4_to(const std::function<double(double)>& f, double y, double t, double max_step) {
    if (t == 0.0) return y;
    const auto steps = static_cast<long>(std::ceil(t / max_step - 1e-12));
    const double h = t / static_cast<double>(steps);
    for (long i = 0; i < steps; ++i) {
        y = rk4_step(f, y, h);
        if (!std::isfinite(y) || std::abs(y) > kBlowUp)
            throw NumericError("ODE solution blows up before t = " + std::to_string(t));
    }
    return y;
}

void check_oracle(const OdeOracle& o) {
    if (!o.f) throw ConfigError("ODE oracle needs f");
    if (!(o.horizon > 0.0)) throw ConfigError("ODE oracle: horizon must be > 0");
    if (!(o.step > 0.0) || o.step > o.horizon / 100.0 * (1.0 + 1e-12))
        throw ConfigError("ODE oracle: step must lie in (0, T/100]");
    if (!(o.tolerance > 0.0)) throw ConfigError("ODE oracle: tolerance must be > 0");
}

// Step size for which RK4 with h and h/2 agree to the tolerance at t.
double settled_step(const OdeOracle& o, double t) {
    double h = o.step;
    for (int i = 0; i < kMaxHalvings; ++i, h /= 2.0) {
        const double coarse = rk4_to(o.f, o.u0, t, h);
        const double fine = rk4_to(o.f, o.u0, t, h / 2.0);
        if (std::abs(coarse - fine) < o.tolerance) return h / 2.0;
    }
    throw NumericError("ODE step doubling did not reach tolerance");
}

// -- tridiagonal solvers ------------------------------------------------------------

// Solves sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i] in place of rhs.
void thomas(const std::vector<double>& sub, const std::vector<double>& diag, const std::vector<double>& sup,
            std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n);
    double denom = diag[0];
    c[0] = sup[0] / denom;
    rhs[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / denom;
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

// Periodic variant: sub[0] couples row 0 to x[n-1], sup[n-1] couples row n-1 to x[0].
void cyclic_thomas(const std::vector<double>& sub, const std::vector<double>& diag, const std::vector<double>& sup,
                   std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    const double alpha = sup[n - 1];
    const double beta = sub[0];
    const double gamma = -diag[0];
    std::vector<double> d2 = diag;
    d2[0] -= gamma;
    d2[n - 1] -= alpha * beta / gamma;
    std::vector<double> z(n, 0.0);
    z[0] = gamma;
    z[n - 1] = alpha;
    thomas(sub, d2, sup, rhs);
    thomas(sub, d2, sup, z);
    const double fact = (rhs[0] + beta * rhs[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    for (std::size_t i = 0; i < n; ++i) rhs[i] -= fact * z[i];
}

class Strang1d {
public:
    Strang1d(const PdeProblem& problem, const FdOracle1d& cfg, int points)
        : nl_(problem.nonlinearity), boundary_(cfg.boundary) {
        const double L = cfg.half_width;
        const auto n = static_cast<std::size_t>(points);
        h_ = boundary_ == Boundary::Neumann ? 2.0 * L / (points - 1) : 2.0 * L / points;
        grid_.resize(n);
        for (std::size_t i = 0; i < n; ++i) grid_[i] = -L + h_ * static_cast<double>(i);
        u_.resize(n);
        for (std::size_t i = 0; i < n; ++i) u_[i] = problem.data.eval(std::span<const double>(&grid_[i], 1));
    }

    void advance(double t, double dt) {
        react(t, 0.5 * dt);
        diffuse(dt);
        react(t + 0.5 * dt, 0.5 * dt);
        for (double v : u_) {
            if (!std::isfinite(v) || std::abs(v) > kBlowUp)
                throw NumericError("finite-difference run unstable near t = " + std::to_string(t) +
                                   "; try dt <= " + std::to_string(dt / 10.0));
        }
    }

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return u_; }

private:
    void react(double t, double tau) {
        for (std::size_t i = 0; i < u_.size(); ++i) {
            const std::span<const double> x(&grid_[i], 1);
            auto f = [&](double s, double v) { return nl_.eval(s, x, v); };
            const double y = u_[i];
            const double k1 = f(t, y);
            const double k2 = f(t + 0.5 * tau, y + 0.5 * tau * k1);
            const double k3 = f(t + 0.5 * tau, y + 0.5 * tau * k2);
            const double k4 = f(t + tau, y + tau * k3);
            u_[i] = y + tau / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }

    void diffuse(double dt) {
        const std::size_t n = u_.size();
        const double lam = dt / (2.0 * h_ * h_);
        std::vector<double> sub(n, -lam), diag(n, 1.0 + 2.0 * lam), sup(n, -lam), rhs(n);
        if (boundary_ == Boundary::Neumann) {
            // Reflecting ghost nodes u[-1] = u[1], u[n] = u[n-2].
            rhs[0] = (1.0 - 2.0 * lam) * u_[0] + 2.0 * lam * u_[1];
            rhs[n - 1] = (1.0 - 2.0 * lam) * u_[n - 1] + 2.0 * lam * u_[n - 2];
            for (std::size_t i = 1; i + 1 < n; ++i)
                rhs[i] = lam * u_[i - 1] + (1.0 - 2.0 * lam) * u_[i] + lam * u_[i + 1];
            sub[0] = 0.0;
            sup[0] = -2.0 * lam;
            sub[n - 1] = -2.0 * lam;
            sup[n - 1] = 0.0;
            thomas(sub, diag, sup, rhs);
        } else {
            for (std::size_t i = 0; i < n; ++i)
                rhs[i] = lam * u_[(i + n - 1) % n] + (1.0 - 2.0 * lam) * u_[i] + lam * u_[(i + 1) % n];
            cyclic_thomas(sub, diag, sup, rhs);
        }
        u_ = std::move(rhs);
    }

    const Nonlinearity& nl_;
    Boundary boundary_;
    double h_ = 0.0;
    std::vector<double> grid_;
    std::vector<double> u_;
};

GridSolution run_fd(const PdeProblem& problem, const FdOracle1d& cfg, int points, double dt,
                    std::span<const double> times) {
    Strang1d solver(problem, cfg, points);
    GridSolution out;
    out.grid = solver.grid();
    double now = 0.0;
    for (double target : times) {
        const double span = target - now;
        if (span > 0.0) {
            const auto steps = static_cast<long>(std::ceil(span / dt - 1e-9));
            const double step = span / static_cast<double>(steps);
            for (long s = 0; s < steps; ++s) solver.advance(now + step * static_cast<double>(s), step);
        }
        now = target;
        out.times.push_back(target);
        out.values.push_back(solver.values());
    }
    return out;
}

}  // namespace

// -- ODE ---------------------------------------------------------------------------------

OdeOracle ode_oracle(const PdeProblem& problem) {
    problem.validate();
    if (!problem.nonlinearity.autonomous || !problem.data.constant_value)
        throw ConfigError("ODE oracle needs an autonomous f and a constant datum");
    OdeOracle o;
    auto f = problem.nonlinearity.eval;
    const std::vector<double> origin(static_cast<std::size_t>(problem.dimension), 0.0);
    o.f = [f, origin](double y) { return f(0.0, origin, y); };
    o.u0 = *problem.data.constant_value;
    o.horizon = problem.horizon;
    o.step = problem.horizon / 100.0;
    return o;
}

double ode_solve(const OdeOracle& oracle, double t) {
    check_oracle(oracle);
    if (!(t >= 0.0 && t <= oracle.horizon)) throw ConfigError("ode_solve: t outside [0, T]");
    if (t == 0.0) return oracle.u0;
    return rk4_to(oracle.f, oracle.u0, t, settled_step(oracle, t));
}

OdeSolution::OdeSolution(const OdeOracle& oracle) : f_(oracle.f), horizon_(oracle.horizon) {
    check_oracle(oracle);
    const double h = settled_step(oracle, oracle.horizon);
    const auto steps = static_cast<long>(std::ceil(oracle.horizon / h - 1e-12));
    step_ = oracle.horizon / static_cast<double>(steps);
    values_.reserve(static_cast<std::size_t>(steps) + 1);
    values_.push_back(oracle.u0);
    for (long i = 0; i < steps; ++i) {
        const double y = rk4_step(f_, values_.back(), step_);
        if (!std::isfinite(y) || std::abs(y) > kBlowUp) throw NumericError("ODE solution blows up");
        values_.push_back(y);
    }
    slopes_.reserve(values_.size());
    for (double y : values_) slopes_.push_back(f_(y));
}

double OdeSolution::operator()(double t) const {
    if (!(t >= 0.0 && t <= horizon_ * (1.0 + 1e-12))) throw ConfigError("OdeSolution: t outside [0, T]");
    const std::size_t last = values_.size() - 1;
    auto j = static_cast<std::size_t>(t / step_);
    if (j >= last) j = last - 1;
    const double s = (t - step_ * static_cast<double>(j)) / step_;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * values_[j] + h10 * step_ * slopes_[j] + h01 * values_[j + 1] + h11 * step_ * slopes_[j + 1];
}

double allen_cahn_closed_form(double u0, double t) {
    const double u2 = u0 * u0;
    return u0 * std::exp(t) / std::sqrt(1.0 - u2 + u2 * std::exp(2.0 * t));
}

// -- FD --------------------------------------------------------------------------------------

GridSolution fd_solve_1d(const PdeProblem& problem, const FdOracle1d& oracle, std::span<const double> times) {
    problem.validate();
    if (problem.dimension != 1) throw ConfigError("fd_solve_1d needs d = 1");
    if (problem.orientation != Orientation::Forward) throw ConfigError("fd_solve_1d needs a forward problem");
    if (!(oracle.half_width > 0.0) || oracle.points < 5 || !(oracle.dt > 0.0))
        throw ConfigError("fd oracle: needs half_width > 0, points >= 5, dt > 0");
    if (times.empty()) throw ConfigError("fd_solve_1d: empty time ladder");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0 && times[i] <= problem.horizon)) throw ConfigError("fd_solve_1d: time outside [0, T]");
        if (i > 0 && times[i] < times[i - 1]) throw ConfigError("fd_solve_1d: time ladder must be nondecreasing");
    }

    GridSolution coarse = run_fd(problem, oracle, oracle.points, oracle.dt, times);
    if (!oracle.self_check) return coarse;

    const int fine_points = oracle.boundary == Boundary::Neumann ? 2 * oracle.points - 1 : 2 * oracle.points;
    const GridSolution fine = run_fd(problem, oracle, fine_points, oracle.dt / 2.0, times);
    double change = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k)
        for (std::size_t i = 0; i < coarse.grid.size(); ++i)
            change = std::max(change, std::abs(coarse.values[k][i] - fine.values[k][2 * i]));
    coarse.refinement_change = change;
    if (change >= oracle.refinement_tolerance)
        throw NumericError("finite-difference refinement check failed: change " + std::to_string(change) +
                           " >= " + std::to_string(oracle.refinement_tolerance));
    return coarse;
}

double grid_value(const GridSolution& solution, std::size_t time_index, double x) {
    const auto& g = solution.grid;
    const auto& v = solution.values.at(time_index);
    if (x <= g.front()) return v.front();
    if (x >= g.back()) return v.back();
    const auto it = std::upper_bound(g.begin(), g.end(), x);
    const auto j = static_cast<std::size_t>(it - g.begin()) - 1;
    const double w = (x - g[j]) / (g[j + 1] - g[j]);
    return (1.0 - w) * v[j] + w * v[j + 1];
}

MaxPrincipleReport max_principle_check(const GridSolution& solution, double coercivity, double kappa,
                                       double tolerance) {
    MaxPrincipleReport report;
    report.worst_margin = HUGE_VAL;
    for (std::size_t k = 0; k < solution.times.size(); ++k) {
        double m = 0.0;
        for (double v : solution.values[k]) m = std::max(m, std::isfinite(v) ? std::abs(v) : HUGE_VAL);
        const double b = std::exp(coercivity * solution.times[k]) * std::sqrt(1.0 + kappa * kappa);
        report.max_abs.push_back(m);
        report.bound.push_back(b);
        const double margin = b + tolerance - m;
        report.worst_margin = std::min(report.worst_margin, margin);
        if (!(margin >= 0.0)) report.passed = false;
    }
    return report;
}

// -- Feynman-Kac residual ------------------------------------------------------------------

ResidualEstimate fixed_point_residual(const ReferenceSolution& u_ref, const PdeProblem& problem, double t,
                                      PointView x, std::size_t samples, std::uint64_t seed) {
    problem.validate();
    if (samples < 2) throw ConfigError("fixed_point_residual: needs at least 2 samples");
    if (!(t >= 0.0 && t <= problem.horizon)) throw ConfigError("fixed_point_residual: t outside [0, T]");
    if (x.size() != static_cast<std::size_t>(problem.dimension)) throw ConfigError("fixed_point_residual: bad point");

    const bool forward = problem.orientation == Orientation::Forward;
    const double T = problem.horizon;
    const double scale = forward ? 2.0 : 1.0;
    const double span = forward ? t : T - t;
    const double datum_time = forward ? 0.0 : T;
    const double center = u_ref(t, x);

    const StreamNode root = StreamNode::root(seed);
    Point endpoint(x.size()), inner(x.size());
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const StreamNode node = root.extended(static_cast<std::int64_t>(i));
        brownian_point_into(node.extended(0).key(), x, scale, span, endpoint);

        const std::uint64_t key = node.extended(1).key();
        const double u = uniform_at(key, kUniformSlot);
        const double s = forward ? t * u : t + (T - t) * u;
        brownian_point_into(key, x, scale, forward ? t - s : s - t, inner);

        const double rhs =
            u_ref(datum_time, endpoint) + span * problem.nonlinearity.eval(s, inner, u_ref(s, inner));
        const double r = center - rhs;
        const double delta = r - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (r - mean);
    }
    const double n = static_cast<double>(samples);
    return {mean, std::sqrt(m2 / (n - 1.0) / n), samples};
}

// -- export -------------------------------------------------------------------------------

void write_grid_csv(std::ostream& out, const GridSolution& solution) {
    CsvWriter csv(out);
    csv.header({"t", "x", "value"});
    for (std::size_t k = 0; k < solution.times.size(); ++k)
        for (std::size_t i = 0; i < solution.grid.size(); ++i)
            csv.field(solution.times[k]).field(solution.grid[i]).field(solution.values[k][i]).end_row();
}

void write_ode_csv(std::ostream& out, const OdeOracle& oracle, std::span<const double> times) {
    CsvWriter csv(out);
    csv.header({"t", "value"});
    for (double t : times) csv.field(t).field(ode_solve(oracle, t)).end_row();
}

}  // namespace mlp
