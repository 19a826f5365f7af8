#pragma once

#include <stdexcept>
#include <string>

namespace qbm {

enum class ErrorCode : int {
    ok = 0,
    domain = 1,
    parameter = 2,
    config = 3,
    degeneracy = 4,
    convergence = 5,
    consistency = 6,
    integration = 7,
    tolerance = 8,
    internal = 9,
};

const char* error_code_name(ErrorCode c) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

#define QBM_DEFINE_ERROR(Name, Code)                                              \
    class Name : public Error {                                                   \
    public:                                                                       \
        explicit Name(const std::string& what) : Error(ErrorCode::Code, what) {} \
    };

QBM_DEFINE_ERROR(DomainError, domain)
QBM_DEFINE_ERROR(ParameterError, parameter)
QBM_DEFINE_ERROR(ConfigError, config)
QBM_DEFINE_ERROR(DegeneracyError, degeneracy)
QBM_DEFINE_ERROR(ConvergenceError, convergence)
QBM_DEFINE_ERROR(ConsistencyError, consistency)
QBM_DEFINE_ERROR(IntegrationError, integration)
QBM_DEFINE_ERROR(ToleranceError, tolerance)

#undef QBM_DEFINE_ERROR

}  // namespace qbm
