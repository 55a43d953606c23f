#include "mlp/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "mlp/bounds.hpp"
#include "mlp/csv.hpp"
#include "mlp/error.hpp"
#include "mlp/estimator.hpp"
#include "mlp/experiments.hpp"
#include "mlp/oracles.hpp"
#include "mlp/randomness.hpp"

namespace mlp::cli {

namespace {

std::string output_path(const RunConfig& config, const Options& opts, const std::string& fallback) {
    if (!opts.out.empty()) return opts.out;
    if (!config.output.path.empty()) return config.output.path;
    return fallback;
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& emit) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open output file '" + path + "'");
    emit(file);
    if (!file) throw ConfigError("failed writing '" + path + "'");
}

int branching_for(const EstimatorConfig& cfg) { return cfg.branching > 0 ? cfg.branching : std::max(cfg.levels, 1); }

double oracle_value_for(const RunConfig& config, const PdeProblem& problem, double t, PointView x) {
    const auto& kind = config.converge.oracle;
    if (kind == "value") {
        if (!config.converge.oracle_value) throw ConfigError("converge.oracle = value needs converge.oracle_value");
        return *config.converge.oracle_value;
    }
    if (kind == "ode") {
        const double s = problem.orientation == Orientation::Forward ? t : problem.horizon - t;
        return ode_solve(ode_oracle(problem), s);
    }
    FdOracle1d fd;
    fd.half_width = config.oracle.fd_half_width;
    fd.points = config.oracle.fd_points;
    fd.dt = config.oracle.fd_dt;
    fd.boundary = config.oracle.fd_boundary == "periodic" ? Boundary::Periodic : Boundary::Neumann;
    const double times[] = {t};
    return grid_value(fd_solve_1d(problem, fd, times), 0, x[0]);
}

bool check(std::ostream& out, const std::string& name, bool ok) {
    out << (ok ? "PASS " : "FAIL ") << name << '\n';
    return ok;
}

}  // namespace

int cmd_estimate(const RunConfig& config, const Options& opts, std::ostream& out) {
    const PdeProblem problem = build_problem(config.problem);
    const auto& ec = config.estimator;
    MlpParams params;
    params.levels = ec.levels;
    params.branching = branching_for(ec);
    params.truncation_radius = resolve_radius(ec, problem, params.branching);
    params.seed = ec.seed;
    const double t = evaluation_time(ec, config.problem);
    const Point x = evaluation_point(ec, problem.dimension);

    const auto results = estimate_batch(problem, params, t, x, ec.repetitions, opts.threads);
    RunningStats stats;
    CostTally per_run;
    for (const auto& r : results) {
        stats.push(r.value);
        per_run = r.tally;
    }

    const std::uint64_t model = cost_recursion(problem.dimension, params.levels, params.branching);
    out << std::setprecision(10);
    out << "mean = " << stats.mean() << '\n'
        << "standard_error = " << stats.standard_error() << '\n'
        << "repetitions = " << ec.repetitions << '\n'
        << "n = " << params.levels << ", M = " << params.branching << ", r = " << params.truncation_radius
        << " (rho_min = " << rho_min(problem) << ")\n"
        << "gaussian_draws = " << per_run.gaussian_scalars << '\n'
        << "uniform_draws = " << per_run.uniforms << '\n'
        << "f_evals = " << per_run.f_evals << '\n'
        << "cost_model = " << model << '\n';
    if (params.levels > 0) out << "cost_bound = " << cost_bound(problem.dimension, params.levels, params.branching) << '\n';

    const std::string path = output_path(config, opts, "");
    if (!path.empty()) {
        write_file(path, [&](std::ostream& file) {
            CsvWriter csv(file);
            csv.header({"repetition", "value", "gaussian_draws", "uniform_draws", "f_evals", "data_evals"});
            for (std::size_t j = 0; j < results.size(); ++j) {
                const auto& r = results[j];
                csv.field(static_cast<std::uint64_t>(j)).field(r.value).field(r.tally.gaussian_scalars)
                    .field(r.tally.uniforms).field(r.tally.f_evals).field(r.tally.data_evals).end_row();
            }
        });
        out << "wrote " << path << '\n';
    }
    return kSuccess;
}

int cmd_converge(const RunConfig& config, const Options& opts, std::ostream& out) {
    const PdeProblem problem = build_problem(config.problem);
    const auto& ec = config.estimator;
    const double t = evaluation_time(ec, config.problem);
    const Point x = evaluation_point(ec, problem.dimension);
    const double oracle = oracle_value_for(config, problem, t, x);
    const auto schedule = build_schedule(ec);

    ConvergenceSetup setup;
    setup.repetitions = ec.repetitions;
    setup.seed = ec.seed;
    setup.workers = opts.threads;
    std::vector<ConvergenceRow> rows;
    for (int n : config.converge.levels) {
        setup.levels = {n};
        if (ec.radius == "schedule") setup.radius = schedule.radius_at(std::max(n, 1));
        else if (ec.radius != "auto") setup.radius = resolve_radius(ec, problem, std::max(n, 1));
        const auto r = rmse_vs_oracle(problem, oracle, t, x, schedule, setup);
        rows.insert(rows.end(), r.begin(), r.end());
    }

    const std::string path = output_path(config, opts, "convergence.csv");
    write_file(path, [&](std::ostream& f) { write_convergence_csv(f, rows, config.output.timing); });
    out << "converge: " << rows.size() << " rows, oracle " << std::setprecision(10) << oracle;
    if (!rows.empty()) out << ", last rmse " << rows.back().rmse << " (bias " << rows.back().bias << ")";
    out << ", wrote " << path << '\n';
    return kSuccess;
}

int cmd_scale(const RunConfig& config, const Options& opts, std::ostream& out) {
    const auto& ec = config.estimator;
    ScalingSetup setup;
    setup.dimensions = config.scale.dimensions;
    setup.levels = config.scale.levels;
    setup.repetitions = ec.repetitions;
    setup.seed = ec.seed;
    setup.workers = opts.threads;
    if (setup.dimensions.empty()) throw ConfigError("scale.dimensions is empty");
    if (ec.radius != "auto")
        setup.radius = resolve_radius(ec, build_problem(config.problem, setup.dimensions.front()), setup.levels);

    const double t = evaluation_time(ec, config.problem);
    const auto report = dimension_scaling([&](int d) { return build_problem(config.problem, d); }, t,
                                          build_schedule(ec), setup);
    const std::string path = output_path(config, opts, "scaling.csv");
    write_file(path, [&](std::ostream& f) { write_scaling_csv(f, report.rows, config.output.timing); });
    out << "scale: " << report.rows.size() << " rows, cost model " << (report.cost_model_affine ? "affine" : "NOT affine")
        << " in d (slope " << report.cost_slope << ", intercept " << report.cost_intercept << "), draws R^2 "
        << std::setprecision(12) << report.draws_fit_r2 << ", wrote " << path << '\n';
    return kSuccess;
}

int cmd_sweep(const RunConfig& config, const Options& opts, std::ostream& out) {
    const auto& sc = config.sweep;
    const BoundConstants consts = sc.constants == "surrogate" ? lipschitz_free_surrogate(config.problem.horizon)
                                                              : bound_constants(build_problem(config.problem));
    SweepSetup setup;
    setup.epsilons = sc.epsilons;
    setup.dimensions = sc.dimensions;
    setup.delta = sc.delta;
    setup.growth_p = sc.growth_p;
    setup.level_offset = sc.level_offset;
    setup.n_max = sc.n_max;
    const auto report = epsilon_sweep(consts, build_schedule(config.estimator), setup);
    const std::string path = output_path(config, opts, "sweep.csv");
    write_file(path, [&](std::ostream& f) { write_sweep_csv(f, report.rows); });
    out << "sweep: " << report.rows.size() << " rows, normalized cost max/min = " << std::setprecision(10)
        << report.normalized_max << " / " << report.normalized_min << " (ratio " << report.ratio() << "), wrote "
        << path << '\n';
    return kSuccess;
}

int cmd_oracle(const RunConfig& config, const Options& opts, std::ostream& out) {
    const PdeProblem problem = build_problem(config.problem);
    const std::string path = output_path(config, opts, "oracle.csv");
    const auto& oc = config.oracle;
    if (oc.kind == "ode") {
        const OdeOracle ode = ode_oracle(problem);
        write_file(path, [&](std::ostream& f) { write_ode_csv(f, ode, oc.times); });
        out << "oracle: ode, " << oc.times.size() << " times, wrote " << path << '\n';
        return kSuccess;
    }
    FdOracle1d fd;
    fd.half_width = oc.fd_half_width;
    fd.points = oc.fd_points;
    fd.dt = oc.fd_dt;
    fd.boundary = oc.fd_boundary == "periodic" ? Boundary::Periodic : Boundary::Neumann;
    const GridSolution sol = fd_solve_1d(problem, fd, oc.times);
    const auto mp = max_principle_check(sol, problem.nonlinearity.coercivity_c, problem.data.sup_bound_kappa,
                                        1e-6 + fd.refinement_tolerance);
    write_file(path, [&](std::ostream& f) { write_grid_csv(f, sol); });
    out << "oracle: fd, " << sol.grid.size() << " points x " << sol.times.size() << " times, refinement change "
        << sol.refinement_change << ", max principle " << (mp.passed ? "holds" : "VIOLATED") << ", wrote " << path
        << '\n';
    return kSuccess;
}

int cmd_cost(const RunConfig& config, const Options& opts, std::ostream& out) {
    const auto& cc = config.cost;
    if (cc.max_level < 1) throw ConfigError("cost.max_level must be >= 1");
    std::size_t rows = 0;
    std::size_t violations = 0;
    const std::string path = output_path(config, opts, "cost.csv");
    std::ostringstream body;
    {
        CsvWriter csv(body);
        csv.header({"d", "n", "M", "cost_model", "cost_bound", "bound_holds"});
        for (int d : cc.dimensions)
            for (int n = 1; n <= cc.max_level; ++n)
                for (int M = 1; M <= cc.max_level; ++M) {
                    const std::uint64_t model = cost_recursion(d, n, M);
                    const double bound = cost_bound(d, n, M);
                    const bool holds = static_cast<double>(model) <= bound;
                    violations += holds ? 0 : 1;
                    ++rows;
                    csv.field(d).field(n).field(M).field(model).field(bound).field(holds).end_row();
                }
    }
    write_file(path, [&](std::ostream& f) { f << body.str(); });
    out << "cost: " << rows << " rows, " << violations << " bound violations, wrote " << path << '\n';
    return violations == 0 ? kSuccess : kFailure;
}

int cmd_selftest(std::ostream& out) {
    bool ok = true;
    for (const auto& g : builtin_golden_values()) {
        const std::uint64_t v = raw_bits(StreamKey{g.seed, g.node, g.counter});
        ok &= check(out, "golden " + std::to_string(g.seed) + " " + g.node.to_string() + " " + std::to_string(g.counter),
                    v == g.value);
    }
    ok &= check(out, "truncate identity", truncate_value(0.3, 1.0) == 0.3);
    ok &= check(out, "truncate upper", truncate_value(5.0, 1.0) == 1.0);
    ok &= check(out, "truncate lower", truncate_value(-5.0, 1.0) == -1.0);
    ok &= check(out, "truncate idempotent", truncate_value(truncate_value(7.5, 2.0), 2.0) == truncate_value(7.5, 2.0));

    const Nonlinearity ac = allen_cahn();
    const Point origin{0.0};
    ok &= check(out, "allen_cahn f(2) = -6", ac.eval(0.0, origin, 2.0) == -6.0);
    ok &= check(out, "allen_cahn L(1) = 6", ac.lipschitz_local(1.0) == 6.0);
    ok &= check(out, "allen_cahn truncated f(10; r=2) = -6", eval_truncated_f(ac, 0.0, origin, 10.0, 2.0) == -6.0);
    const auto sched = default_schedule();
    ok &= check(out, "schedule clamps n = 1", sched.radius_at(1) == sched.radius_at(2));
    ok &= check(out, "schedule(2) = ln(1 + ln 2)", std::abs(sched.radius_at(2) - 0.52658903) < 1e-7);

    ok &= check(out, "cost C(1,1,2) = 6", cost_recursion(1, 1, 2) == 6);
    ok &= check(out, "cost C(1,2,2) = 28", cost_recursion(1, 2, 2) == 28);
    ok &= check(out, "cost C(d,0,M) = 0", cost_recursion(7, 0, 3) == 0);
    ok &= check(out, "cost C(10,1,3) = 63", cost_recursion(10, 1, 3) == 63);
    ok &= check(out, "apriori bound c=0 kappa=0", apriori_sup_bound(0.0, 0.0, 3.0) == 1.0);

    const PdeProblem p = make_problem(1, 0.5, Orientation::Forward, allen_cahn(), constant_datum(2.0));
    MlpParams params;
    params.truncation_radius = 1.0;
    const auto zero = estimate(p, params, 0.5, origin);
    ok &= check(out, "estimator n = 0 is 0", zero.value == 0.0 && zero.tally == CostTally{});
    params.levels = 1;
    const auto one = estimate(p, params, 0.5, origin);
    ok &= check(out, "estimator n = M = 1 constant datum", one.value == 2.0 && one.tally.gaussian_scalars == 1 &&
                                                               one.tally.uniforms == 0);

    OdeOracle eq;
    eq.f = [](double y) { return y - y * y * y; };
    eq.u0 = 1.0;
    eq.horizon = 1.0;
    eq.step = 0.01;
    ok &= check(out, "ode equilibrium u0 = 1", ode_solve(eq, 0.7) == 1.0);

    out << (ok ? "selftest: all checks passed\n" : "selftest: FAILURES\n");
    return ok ? kSuccess : kFailure;
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Truncated multilevel Picard estimator for semilinear heat equations", "mlp"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string out_path;
    std::vector<std::string> overrides;
    bool no_timing = false;

    std::string chosen;
    const std::vector<std::pair<std::string, std::string>> subcommands = {
        {"estimate", "Run the estimator and print mean, standard error and draw counts"},
        {"converge", "RMSE against an oracle over diagonal levels n = M (convergence.csv)"},
        {"scale", "Draw counts and cost model across dimensions (scaling.csv)"},
        {"sweep", "Level selection and cumulative cost over an epsilon grid (sweep.csv)"},
        {"oracle", "ODE or 1-D finite-difference reference solution (oracle.csv)"},
        {"cost", "Cost recursion against d (5M)^n (cost.csv)"},
        {"selftest", "Golden RNG values and built-in invariants"},
    };
    for (const auto& [name, help] : subcommands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", config_path, "Config file (key = value with [sections])");
        sub->add_option("--seed", seed, "64-bit seed, overrides estimator.seed");
        sub->add_option("--threads", threads, "Worker threads (fallback: MLP_THREADS)");
        sub->add_option("--out", out_path, "Output path, overrides output.path");
        sub->add_option("--set", overrides, "Override a config key: section.key=value");
        sub->add_flag("--no-timing", no_timing, "Omit wall-time columns from CSV output");
        sub->callback([&chosen, name = name] { chosen = name; });
    }

    std::vector<const char*> cargv;
    for (const auto& a : argv) cargv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kConfigError;
    }

    try {
        if (chosen == "selftest") return cmd_selftest(out);

        RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
        for (const auto& o : overrides) apply_override(config, o);
        if (seed) config.estimator.seed = *seed;
        if (no_timing) config.output.timing = false;

        Options opts;
        opts.out = out_path;
        opts.threads = config.threads;
        if (threads) {
            opts.threads = *threads;
        } else if (const char* env = std::getenv("MLP_THREADS"); env && *env) {
            std::size_t used = 0;
            try {
                opts.threads = std::stoi(env, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || env[used] != '\0')
                throw ConfigError(std::string("MLP_THREADS is not an integer: '") + env + "'");
        }
        if (opts.threads < 0) throw ConfigError("threads must be >= 0");

        if (chosen == "estimate") return cmd_estimate(config, opts, out);
        if (chosen == "converge") return cmd_converge(config, opts, out);
        if (chosen == "scale") return cmd_scale(config, opts, out);
        if (chosen == "sweep") return cmd_sweep(config, opts, out);
        if (chosen == "oracle") return cmd_oracle(config, opts, out);
        if (chosen == "cost") return cmd_cost(config, opts, out);
        err << "error: no subcommand\n";
        return kConfigError;
    } catch (const CapExceeded& e) {
        err << "error: " << e.what() << " (smallest bound " << e.best_bound() << " at n = " << e.best_level() << ")\n";
        return kCapExceeded;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return kNumericError;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
}

}  // namespace mlp::cli
