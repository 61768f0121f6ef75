#ifndef RINGFC_ERRORS_HPP
#define RINGFC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ringfc {

// Bad or missing configuration input (file level).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A typed value violates one of its declared invariants.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Argument outside the domain an operation accepts.
struct ArgumentError : std::invalid_argument {
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// Requested point lies outside a model's declared validity window.
struct RangeError : std::runtime_error {
    double clamped_value = 0.0; // nearest admissible value, when meaningful
    explicit RangeError(const std::string& what, double clamped = 0.0)
        : std::runtime_error(what), clamped_value(clamped) {}
};

// Iterative procedure failed to converge; carries the final residual.
struct ConvergenceError : std::runtime_error {
    double residual = 0.0;
    ConvergenceError(const std::string& what, double res)
        : std::runtime_error(what), residual(res) {}
};

// Nonlinear fit did not reach an acceptable solution.
struct FitError : std::runtime_error {
    double residual = 0.0;
    explicit FitError(const std::string& what, double res = 0.0)
        : std::runtime_error(what), residual(res) {}
};

// Linear system condition estimate exceeded the trust threshold.
struct IllConditionedError : std::runtime_error {
    double condition = 0.0;
    IllConditionedError(const std::string& what, double cond)
        : std::runtime_error(what), condition(cond) {}
};

} // namespace ringfc

#endif // RINGFC_ERRORS_HPP
