#include "qbm/errors.hpp"

namespace qbm {

const char* error_code_name(ErrorCode c) noexcept {
    switch (c) {
        case ErrorCode::ok: return "ok";
        case ErrorCode::domain: return "domain error";
        case ErrorCode::parameter: return "parameter error";
        case ErrorCode::config: return "config error";
        case ErrorCode::degeneracy: return "degeneracy error";
        case ErrorCode::convergence: return "convergence error";
        case ErrorCode::consistency: return "numerical-consistency error";
        case ErrorCode::integration: return "integration error";
        case ErrorCode::tolerance: return "tolerance error";
        case ErrorCode::internal: return "internal error";
    }
    return "unknown error";
}

}  // namespace qbm
