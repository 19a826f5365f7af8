#include <cmath>
#include <set>
#include <string>

#include "doctest.h"
#include "qbm/errors.hpp"
#include "qbm/validation.hpp"

using namespace qbm;

TEST_CASE("fast validation passes and corrupted spectral data is caught") {
    const ModelParams p{1.0, 1.0, 1.0, 1.0, 1.0, 0.1};
    ValidationReport clean = run_validation(p, ValidationLevel::fast);
    CHECK(clean.all_passed());
    std::set<std::string> names;
    for (const CheckResult& c : clean.checks) {
        INFO(c.name, " measured ", c.measured, " tol ", c.tolerance, " ", c.detail);
        CHECK(c.passed);
        CHECK(std::isfinite(c.measured));
        names.insert(c.name);
    }
    for (const char* n : {"sum_rule_residues", "partial_fraction_reconstruction", "commutator", "zeta_quadrature",
                          "stationary_quadrature", "transient_quadrature", "heisenberg_bound"})
        CHECK(names.count(n) == 1);

    ValidationHooks hooks;
    hooks.corrupt_spectral = [](SpectralData& s) { s.residues[2] *= 1.001; };
    ValidationReport bad = run_validation(p, ValidationLevel::fast, hooks);
    CHECK_FALSE(bad.all_passed());
    for (const CheckResult& c : bad.checks) {
        bool targeted = c.name == "sum_rule_residues" || c.name == "sum_rule_first_moment" ||
                        c.name == "partial_fraction_reconstruction";
        INFO(c.name);
        CHECK(c.passed == !targeted);
    }
}

TEST_CASE("validation rejects invalid parameters up front") {
    ModelParams p;
    p.sigma = -1.0;
    CHECK_THROWS_AS(run_validation(p, ValidationLevel::fast), ParameterError);
}
