#pragma once

#include <stdexcept>
#include <string>

namespace mlp {

// Malformed or inconsistent user input (config keys, out-of-range parameters).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Arithmetic that cannot be carried out faithfully: integer overflow in the
// cost model, ODE blow-up, unstable finite-difference runs.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A capped search (level selection) found no admissible answer below its cap.
class CapExceeded : public std::runtime_error {
public:
    CapExceeded(const std::string& what, double best_bound, int best_level)
        : std::runtime_error(what), best_bound_(best_bound), best_level_(best_level) {}

    double best_bound() const noexcept { return best_bound_; }
    int best_level() const noexcept { return best_level_; }

private:
    double best_bound_;
    int best_level_;
};

}  // namespace mlp
