#pragma once

// Run configuration for the command-line tool.
//
// Grammar (UTF-8, line oriented):
//
//   file    := { line }
//   line    := blank | comment | section | entry
//   comment := ('#' | ';') any-text
//   section := '[' name ']'
//   entry   := key '=' value          (surrounding whitespace is trimmed)
//
// Every key belongs to a section; unknown sections or keys, duplicate keys and
// malformed values raise ConfigError. Lists are comma separated. See
// README.md for the key reference.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mlp/problem.hpp"

namespace mlp {

struct ProblemConfig {
    std::string nonlinearity = "allen_cahn";  // allen_cahn | linear | sine
    double linear_a = 1.0;
    double linear_c = 1.0;
    std::string datum = "constant";  // constant | cosine_mean | gaussian_bump
    double datum_value = 2.0;        // constant datum
    double kappa = 1.0;              // amplitude of cosine_mean / gaussian_bump
    int dimension = 1;
    double horizon = 0.5;
    Orientation orientation = Orientation::Forward;

    friend bool operator==(const ProblemConfig&, const ProblemConfig&) = default;
};

struct EstimatorConfig {
    int levels = 4;
    int branching = 0;             // 0: M = n
    std::string radius = "auto";   // auto | rho_min | schedule | <number>
    std::optional<double> schedule_floor;
    std::uint64_t seed = 0;
    int repetitions = 100;
    std::optional<double> time;    // default: T forward, 0 backward
    std::vector<double> point{0.0};  // one value broadcasts to every coordinate

    friend bool operator==(const EstimatorConfig&, const EstimatorConfig&) = default;
};

struct ConvergeConfig {
    std::vector<int> levels{1, 2, 3, 4, 5};
    std::string oracle = "ode";  // ode | fd | value
    std::optional<double> oracle_value;

    friend bool operator==(const ConvergeConfig&, const ConvergeConfig&) = default;
};

struct ScaleConfig {
    std::vector<int> dimensions{1, 10, 100};
    int levels = 3;

    friend bool operator==(const ScaleConfig&, const ScaleConfig&) = default;
};

struct SweepConfig {
    std::vector<double> epsilons{0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
    std::vector<int> dimensions{1};
    double delta = 1.0;
    double growth_p = 0.0;
    int level_offset = 0;
    int n_max = 64;
    std::string constants = "surrogate";  // surrogate | problem

    friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

struct OracleConfig {
    std::string kind = "ode";  // ode | fd
    std::vector<double> times{0.0, 0.125, 0.25, 0.375, 0.5};
    double fd_half_width = 8.0;
    int fd_points = 801;
    double fd_dt = 1e-3;
    std::string fd_boundary = "neumann";  // neumann | periodic

    friend bool operator==(const OracleConfig&, const OracleConfig&) = default;
};

struct CostConfig {
    std::vector<int> dimensions{1, 10, 100};
    int max_level = 6;

    friend bool operator==(const CostConfig&, const CostConfig&) = default;
};

struct OutputConfig {
    std::string path;  // empty: subcommand default (convergence.csv, ...)
    bool timing = true;

    friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct RunConfig {
    ProblemConfig problem;
    EstimatorConfig estimator;
    ConvergeConfig converge;
    ScaleConfig scale;
    SweepConfig sweep;
    OracleConfig oracle;
    CostConfig cost;
    OutputConfig output;
    int threads = 0;  // [run] threads; 0 = OpenMP default

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);
/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);
/// Applies one "section.key=value" override.
void apply_override(RunConfig& config, std::string_view assignment);

/// Builds the PDE problem a config describes (validated).
PdeProblem build_problem(const ProblemConfig& config);
PdeProblem build_problem(const ProblemConfig& config, int dimension);

/// Evaluation point of dimension d from the broadcast/explicit point list.
Point evaluation_point(const EstimatorConfig& config, int dimension);

/// Evaluation time: explicit or the datum-free end of [0, T].
double evaluation_time(const EstimatorConfig& config, const ProblemConfig& problem);

TruncationSchedule build_schedule(const EstimatorConfig& config);

/// Resolves the radius rule for branching M on the given problem.
double resolve_radius(const EstimatorConfig& config, const PdeProblem& problem, int branching);

}  // namespace mlp
