#pragma once

#include <stdexcept>
#include <string>

namespace warped {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user input: config values, grid parameters, probe radii, unknown keys.
struct ConfigError : Error {
    using Error::Error;
};

// Array lengths do not match the grid they are supposed to live on.
struct ShapeError : Error {
    using Error::Error;
};

// psi <= 0 away from the origin, phi <= 0, or non-finite metric data.
struct DegenerateMetricError : Error {
    using Error::Error;
};

struct UnsupportedDimensionError : Error {
    using Error::Error;
};

// CSV ingestion failure; row is 1-based over data rows (header excluded).
struct IngestionError : Error {
    IngestionError(const std::string& msg, int row_) : Error(msg), row(row_) {}
    int row = 0;
};

struct InsufficientDataError : Error {
    using Error::Error;
};

// An operation was called outside its contract (e.g. reparameterizing a
// trajectory that was not produced by the modified flow).
struct ContractError : Error {
    using Error::Error;
};

// Raised when the evolved metric leaves the admissible region.
struct BlowUpError : Error {
    BlowUpError(const std::string& msg, int node_, double time_)
        : Error(msg), node(node_), time(time_) {}
    int node = -1;
    double time = 0.0;
};

} // namespace warped
