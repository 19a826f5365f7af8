#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qbm/spectral.hpp"

namespace qbm {

enum class ValidationLevel { fast, full };

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;   // error measure, NaN if the check threw
    double tolerance = 0.0;
    std::string detail;      // exception text for a check that threw
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool all_passed() const;
};

struct ValidationHooks {
    // Applied to the spectral data used by the reconstruction and sum-rule checks.
    std::function<void(SpectralData&)> corrupt_spectral;
};

// Closed forms against the quadrature oracles at the given parameters; full
// level adds the 2000-mode reservoir run and its convergence check. A check
// that throws is recorded as failed.
ValidationReport run_validation(const ModelParams& p, ValidationLevel level, const ValidationHooks& hooks = {});

}  // namespace qbm
