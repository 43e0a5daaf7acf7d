#pragma once

#include <stdexcept>
#include <string>

namespace tdcr {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Linear system is numerically singular; carries the condition estimate.
struct SingularSystemError : Error {
    explicit SingularSystemError(double condition, const std::string& where = {})
        : Error("singular system" + (where.empty() ? "" : " in " + where) +
                " (condition estimate " + std::to_string(condition) + ")"),
          condition_estimate(condition) {}
    double condition_estimate;
};

// Matrix cannot be projected onto SO(3): det <= 0.
struct DegenerateRotationError : Error {
    using Error::Error;
};

// Tendon path tangent has near-zero norm at some node.
struct SingularTendonPathError : Error {
    explicit SingularTendonPathError(int tendon, int node = -1)
        : Error("degenerate tendon path tangent (tendon " + std::to_string(tendon) +
                (node >= 0 ? ", node " + std::to_string(node) : "") + ")"),
          tendon_index(tendon), node_index(node) {}
    int tendon_index;
    int node_index;
};

// Spatial integration produced a non-finite or inverted state.
struct DivergenceError : Error {
    explicit DivergenceError(int node)
        : Error("spatial integration diverged at node " + std::to_string(node)),
          node_index(node) {}
    int node_index;
};

// Shooting iteration exhausted without meeting tolerance; carries best residual.
struct NonConvergenceError : Error {
    NonConvergenceError(int iterations, double best_residual, const std::string& context = {})
        : Error("shooting did not converge after " + std::to_string(iterations) +
                " iterations (best residual " + std::to_string(best_residual) + ")" +
                (context.empty() ? "" : " at " + context)),
          iterations(iterations), best_residual(best_residual) {}
    int iterations;
    double best_residual;
};

// Control coupling gain b_c fell below the configured floor.
struct UncontrollableConfigurationError : Error {
    explicit UncontrollableConfigurationError(double b_c)
        : Error("uncontrollable configuration: |b_c| = " + std::to_string(b_c) +
                " below floor"),
          b_c(b_c) {}
    double b_c;
};

// Trace too short for the requested metric.
struct InsufficientDataError : Error {
    using Error::Error;
};

// Configuration file is missing keys or violates invariants.
struct ConfigError : Error {
    using Error::Error;
};

// Trace/shape file could not be parsed; message carries the line number.
struct TraceParseError : Error {
    using Error::Error;
};

}  // namespace tdcr
