#include "mlp/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "mlp/bounds.hpp"
#include "mlp/csv.hpp"
#include "mlp/error.hpp"

namespace mlp {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
    text = trim(text);
    T v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
        throw ConfigError("bad value '" + std::string(text) + "' for " + std::string(what));
    return v;
}

bool parse_bool(std::string_view text, std::string_view what) {
    text = trim(text);
    if (text == "true") return true;
    if (text == "false") return false;
    throw ConfigError("expected true or false for " + std::string(what));
}

template <typename T>
std::vector<T> parse_list(std::string_view text, std::string_view what) {
    std::vector<T> out;
    text = trim(text);
    if (text.empty()) throw ConfigError("empty list for " + std::string(what));
    while (true) {
        const auto comma = text.find(',');
        out.push_back(parse_number<T>(text.substr(0, comma), what));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

std::string show(double v) { return format_real(v); }
std::string show(int v) { return std::to_string(v); }
std::string show(std::uint64_t v) { return std::to_string(v); }
std::string show(bool v) { return v ? "true" : "false"; }

template <typename T>
std::string show_list(const std::vector<T>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += show(v[i]);
    }
    return s;
}

std::string one_of(std::string_view text, std::initializer_list<std::string_view> choices, std::string_view what) {
    text = trim(text);
    for (auto c : choices)
        if (c == text) return std::string(text);
    std::string msg = "unknown " + std::string(what) + " '" + std::string(text) + "' (expected";
    for (auto c : choices) msg += " " + std::string(c);
    throw ConfigError(msg + ")");
}

struct Key {
    std::string section;
    std::string name;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::optional<std::string>(const RunConfig&)> get;
};

const std::vector<Key>& registry() {
    static const std::vector<Key> keys = [] {
        std::vector<Key> k;
        auto add = [&](std::string section, std::string name, auto set, auto get) {
            k.push_back({std::move(section), std::move(name), set, get});
        };
        using Opt = std::optional<std::string>;

        add("problem", "nonlinearity",
            [](RunConfig& c, std::string_view v) { c.problem.nonlinearity = one_of(v, {"allen_cahn", "linear", "sine"}, "nonlinearity"); },
            [](const RunConfig& c) -> Opt { return c.problem.nonlinearity; });
        add("problem", "linear_a", [](RunConfig& c, std::string_view v) { c.problem.linear_a = parse_number<double>(v, "linear_a"); },
            [](const RunConfig& c) -> Opt { return show(c.problem.linear_a); });
        add("problem", "linear_c", [](RunConfig& c, std::string_view v) { c.problem.linear_c = parse_number<double>(v, "linear_c"); },
            [](const RunConfig& c) -> Opt { return show(c.problem.linear_c); });
        add("problem", "datum",
            [](RunConfig& c, std::string_view v) { c.problem.datum = one_of(v, {"constant", "cosine_mean", "gaussian_bump"}, "datum"); },
            [](const RunConfig& c) -> Opt { return c.problem.datum; });
        add("problem", "datum_value", [](RunConfig& c, std::string_view v) { c.problem.datum_value = parse_number<double>(v, "datum_value"); },
            [](const RunConfig& c) -> Opt { return show(c.problem.datum_value); });
        add("problem", "kappa", [](RunConfig& c, std::string_view v) { c.problem.kappa = parse_number<double>(v, "kappa"); },
            [](const RunConfig& c) -> Opt { return show(c.problem.kappa); });
        add("problem", "dimension", [](RunConfig& c, std::string_view v) { c.problem.dimension = parse_number<int>(v, "dimension"); },
            [](const RunConfig& c) -> Opt { return show(c.problem.dimension); });
        add("problem", "horizon", [](RunConfig& c, std::string_view v) { c.problem.horizon = parse_number<double>(v, "horizon"); },
            [](const RunConfig& c) -> Opt { return show(c.problem.horizon); });
        add("problem", "orientation",
            [](RunConfig& c, std::string_view v) { c.problem.orientation = orientation_from_string(std::string(trim(v))); },
            [](const RunConfig& c) -> Opt { return to_string(c.problem.orientation); });

        add("estimator", "levels", [](RunConfig& c, std::string_view v) { c.estimator.levels = parse_number<int>(v, "levels"); },
            [](const RunConfig& c) -> Opt { return show(c.estimator.levels); });
        add("estimator", "branching", [](RunConfig& c, std::string_view v) { c.estimator.branching = parse_number<int>(v, "branching"); },
            [](const RunConfig& c) -> Opt { return show(c.estimator.branching); });
        add("estimator", "radius",
            [](RunConfig& c, std::string_view v) {
                v = trim(v);
                if (v != "auto" && v != "rho_min" && v != "schedule") {
                    if (!(parse_number<double>(v, "radius") > 0.0)) throw ConfigError("radius must be > 0");
                }
                c.estimator.radius = std::string(v);
            },
            [](const RunConfig& c) -> Opt { return c.estimator.radius; });
        add("estimator", "schedule_floor",
            [](RunConfig& c, std::string_view v) { c.estimator.schedule_floor = parse_number<double>(v, "schedule_floor"); },
            [](const RunConfig& c) -> Opt {
                return c.estimator.schedule_floor ? Opt(show(*c.estimator.schedule_floor)) : std::nullopt;
            });
        add("estimator", "seed", [](RunConfig& c, std::string_view v) { c.estimator.seed = parse_number<std::uint64_t>(v, "seed"); },
            [](const RunConfig& c) -> Opt { return show(c.estimator.seed); });
        add("estimator", "repetitions",
            [](RunConfig& c, std::string_view v) { c.estimator.repetitions = parse_number<int>(v, "repetitions"); },
            [](const RunConfig& c) -> Opt { return show(c.estimator.repetitions); });
        add("estimator", "time", [](RunConfig& c, std::string_view v) { c.estimator.time = parse_number<double>(v, "time"); },
            [](const RunConfig& c) -> Opt { return c.estimator.time ? Opt(show(*c.estimator.time)) : std::nullopt; });
        add("estimator", "point", [](RunConfig& c, std::string_view v) { c.estimator.point = parse_list<double>(v, "point"); },
            [](const RunConfig& c) -> Opt { return show_list(c.estimator.point); });

        add("converge", "levels", [](RunConfig& c, std::string_view v) { c.converge.levels = parse_list<int>(v, "converge.levels"); },
            [](const RunConfig& c) -> Opt { return show_list(c.converge.levels); });
        add("converge", "oracle",
            [](RunConfig& c, std::string_view v) { c.converge.oracle = one_of(v, {"ode", "fd", "value"}, "oracle"); },
            [](const RunConfig& c) -> Opt { return c.converge.oracle; });
        add("converge", "oracle_value",
            [](RunConfig& c, std::string_view v) { c.converge.oracle_value = parse_number<double>(v, "oracle_value"); },
            [](const RunConfig& c) -> Opt { return c.converge.oracle_value ? Opt(show(*c.converge.oracle_value)) : std::nullopt; });

        add("scale", "dimensions", [](RunConfig& c, std::string_view v) { c.scale.dimensions = parse_list<int>(v, "scale.dimensions"); },
            [](const RunConfig& c) -> Opt { return show_list(c.scale.dimensions); });
        add("scale", "levels", [](RunConfig& c, std::string_view v) { c.scale.levels = parse_number<int>(v, "scale.levels"); },
            [](const RunConfig& c) -> Opt { return show(c.scale.levels); });

        add("sweep", "epsilons", [](RunConfig& c, std::string_view v) { c.sweep.epsilons = parse_list<double>(v, "epsilons"); },
            [](const RunConfig& c) -> Opt { return show_list(c.sweep.epsilons); });
        add("sweep", "dimensions", [](RunConfig& c, std::string_view v) { c.sweep.dimensions = parse_list<int>(v, "sweep.dimensions"); },
            [](const RunConfig& c) -> Opt { return show_list(c.sweep.dimensions); });
        add("sweep", "delta", [](RunConfig& c, std::string_view v) { c.sweep.delta = parse_number<double>(v, "delta"); },
            [](const RunConfig& c) -> Opt { return show(c.sweep.delta); });
        add("sweep", "growth_p", [](RunConfig& c, std::string_view v) { c.sweep.growth_p = parse_number<double>(v, "growth_p"); },
            [](const RunConfig& c) -> Opt { return show(c.sweep.growth_p); });
        add("sweep", "level_offset", [](RunConfig& c, std::string_view v) { c.sweep.level_offset = parse_number<int>(v, "level_offset"); },
            [](const RunConfig& c) -> Opt { return show(c.sweep.level_offset); });
        add("sweep", "n_max", [](RunConfig& c, std::string_view v) { c.sweep.n_max = parse_number<int>(v, "n_max"); },
            [](const RunConfig& c) -> Opt { return show(c.sweep.n_max); });
        add("sweep", "constants",
            [](RunConfig& c, std::string_view v) { c.sweep.constants = one_of(v, {"surrogate", "problem"}, "constants"); },
            [](const RunConfig& c) -> Opt { return c.sweep.constants; });

        add("oracle", "kind", [](RunConfig& c, std::string_view v) { c.oracle.kind = one_of(v, {"ode", "fd"}, "oracle kind"); },
            [](const RunConfig& c) -> Opt { return c.oracle.kind; });
        add("oracle", "times", [](RunConfig& c, std::string_view v) { c.oracle.times = parse_list<double>(v, "oracle.times"); },
            [](const RunConfig& c) -> Opt { return show_list(c.oracle.times); });
        add("oracle", "fd_half_width",
            [](RunConfig& c, std::string_view v) { c.oracle.fd_half_width = parse_number<double>(v, "fd_half_width"); },
            [](const RunConfig& c) -> Opt { return show(c.oracle.fd_half_width); });
        add("oracle", "fd_points", [](RunConfig& c, std::string_view v) { c.oracle.fd_points = parse_number<int>(v, "fd_points"); },
            [](const RunConfig& c) -> Opt { return show(c.oracle.fd_points); });
        add("oracle", "fd_dt", [](RunConfig& c, std::string_view v) { c.oracle.fd_dt = parse_number<double>(v, "fd_dt"); },
            [](const RunConfig& c) -> Opt { return show(c.oracle.fd_dt); });
        add("oracle", "fd_boundary",
            [](RunConfig& c, std::string_view v) { c.oracle.fd_boundary = one_of(v, {"neumann", "periodic"}, "fd_boundary"); },
            [](const RunConfig& c) -> Opt { return c.oracle.fd_boundary; });

        add("cost", "dimensions", [](RunConfig& c, std::string_view v) { c.cost.dimensions = parse_list<int>(v, "cost.dimensions"); },
            [](const RunConfig& c) -> Opt { return show_list(c.cost.dimensions); });
        add("cost", "max_level", [](RunConfig& c, std::string_view v) { c.cost.max_level = parse_number<int>(v, "max_level"); },
            [](const RunConfig& c) -> Opt { return show(c.cost.max_level); });

        add("output", "path", [](RunConfig& c, std::string_view v) { c.output.path = std::string(trim(v)); },
            [](const RunConfig& c) -> Opt { return c.output.path.empty() ? std::nullopt : Opt(c.output.path); });
        add("output", "timing", [](RunConfig& c, std::string_view v) { c.output.timing = parse_bool(v, "timing"); },
            [](const RunConfig& c) -> Opt { return show(c.output.timing); });

        add("run", "threads", [](RunConfig& c, std::string_view v) { c.threads = parse_number<int>(v, "threads"); },
            [](const RunConfig& c) -> Opt { return show(c.threads); });
        return k;
    }();
    return keys;
}

const Key& find_key(std::string_view section, std::string_view name) {
    for (const auto& k : registry())
        if (k.section == section && k.name == name) return k;
    throw ConfigError("unknown key '" + std::string(name) + "' in section [" + std::string(section) + "]");
}

}  // namespace

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::string section;
    std::set<std::pair<std::string, std::string>> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        const std::string where = "line " + std::to_string(lineno) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            bool known = false;
            for (const auto& k : registry()) known = known || k.section == section;
            if (!known) throw ConfigError(where + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
        if (section.empty()) throw ConfigError(where + "key outside of any section");
        const std::string name(trim(line.substr(0, eq)));
        try {
            const Key& key = find_key(section, name);
            if (!seen.insert({section, name}).second) throw ConfigError("duplicate key '" + name + "'");
            key.set(cfg, trim(line.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& config) {
    std::ostringstream out;
    std::string section;
    for (const auto& k : registry()) {
        const auto value = k.get(config);
        if (!value) continue;
        if (k.section != section) {
            if (!section.empty()) out << '\n';
            section = k.section;
            out << '[' << section << "]\n";
        }
        out << k.name << " = " << *value << '\n';
    }
    return out.str();
}

void apply_override(RunConfig& config, std::string_view assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq)
        throw ConfigError("override must look like section.key=value: '" + std::string(assignment) + "'");
    const auto section = trim(assignment.substr(0, dot));
    const auto name = trim(assignment.substr(dot + 1, eq - dot - 1));
    find_key(section, name).set(config, trim(assignment.substr(eq + 1)));
}

PdeProblem build_problem(const ProblemConfig& config) { return build_problem(config, config.dimension); }

PdeProblem build_problem(const ProblemConfig& config, int dimension) {
    Nonlinearity nl;
    if (config.nonlinearity == "allen_cahn") nl = allen_cahn();
    else if (config.nonlinearity == "linear") nl = linear_reaction(config.linear_a, config.linear_c);
    else if (config.nonlinearity == "sine") nl = sine_reaction();
    else throw ConfigError("unknown nonlinearity '" + config.nonlinearity + "'");

    DataFunction g;
    if (config.datum == "constant") g = constant_datum(config.datum_value);
    else if (config.datum == "cosine_mean") g = cosine_mean_datum(config.kappa);
    else if (config.datum == "gaussian_bump") g = gaussian_bump_datum(config.kappa);
    else throw ConfigError("unknown datum '" + config.datum + "'");

    return make_problem(dimension, config.horizon, config.orientation, std::move(nl), std::move(g));
}

Point evaluation_point(const EstimatorConfig& config, int dimension) {
    if (config.point.size() == 1) return Point(static_cast<std::size_t>(dimension), config.point.front());
    if (config.point.size() != static_cast<std::size_t>(dimension))
        throw ConfigError("point has " + std::to_string(config.point.size()) + " coordinates, dimension is " +
                          std::to_string(dimension));
    return config.point;
}

double evaluation_time(const EstimatorConfig& config, const ProblemConfig& problem) {
    if (config.time) return *config.time;
    return problem.orientation == Orientation::Forward ? problem.horizon : 0.0;
}

TruncationSchedule build_schedule(const EstimatorConfig& config) {
    auto s = default_schedule();
    return config.schedule_floor ? s.with_floor(*config.schedule_floor) : s;
}

double resolve_radius(const EstimatorConfig& config, const PdeProblem& problem, int branching) {
    const auto schedule = build_schedule(config);
    if (config.radius == "auto") return std::max(schedule.radius_at(branching), rho_min(problem));
    if (config.radius == "rho_min") return rho_min(problem);
    if (config.radius == "schedule") return schedule.radius_at(branching);
    const double r = parse_number<double>(config.radius, "radius");
    if (!(r > 0.0)) throw ConfigError("radius must be > 0");
    return r;
}

}  // namespace mlp
