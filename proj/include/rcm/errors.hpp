#pragma once

#include <stdexcept>
#include <string>

namespace rcm {

// Raised when a site or edge lies outside the admissible region of an operation.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EllipticityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolveReport {
    double residual = 0.0;
    int iterations = 0;
    double tolerance = 0.0;
    double wall_seconds = 0.0;
    bool converged = false;
};

struct SolverError : std::runtime_error {
    SolveReport report;
    SolverError(const std::string& what, const SolveReport& r)
        : std::runtime_error(what), report(r) {}
};

}  // namespace rcm
