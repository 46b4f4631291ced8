//==============================================================================
// errors.hpp
// Exception types used across the library. Each maps to one C-API status code.
//==============================================================================
#pragma once

#include <stdexcept>
#include <string>

namespace neel {

enum class ErrorCode {
    invalid_parameter = 1,
    dimension_mismatch = 2,
    solver_failure = 3,
    validity_exit = 4,
    io_failure = 5,
    resource_limit = 6,
    numerical_failure = 7,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

struct InvalidParameter : Error {
    explicit InvalidParameter(const std::string& what) : Error(ErrorCode::invalid_parameter, what) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what) : Error(ErrorCode::dimension_mismatch, what) {}
};

// Carries the last residual so callers can report how close the solve got.
struct SolverFailure : Error {
    SolverFailure(const std::string& what, double residual)
        : Error(ErrorCode::solver_failure, what), last_residual(residual) {}
    double last_residual;
};

// Trajectory left the region where the spherical coordinates are valid.
struct ValidityExit : Error {
    ValidityExit(const std::string& what, double time)
        : Error(ErrorCode::validity_exit, what), exit_time(time) {}
    double exit_time;
};

struct IoFailure : Error {
    explicit IoFailure(const std::string& what) : Error(ErrorCode::io_failure, what) {}
};

struct ResourceLimit : Error {
    explicit ResourceLimit(const std::string& what) : Error(ErrorCode::resource_limit, what) {}
};

struct NumericalFailure : Error {
    explicit NumericalFailure(const std::string& what) : Error(ErrorCode::numerical_failure, what) {}
};

} // namespace neel
