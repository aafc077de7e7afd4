#pragma once

#include <stdexcept>
#include <string>

namespace dispersionlab {

// Base class for all numerical failures raised by the library.  `code()`
// returns a stable machine-readable identifier used by the CLI error JSON.
class error : public std::runtime_error {
public:
    error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct non_convergence_error : error {
    explicit non_convergence_error(const std::string& what)
        : error("NonConvergence", what) {}
};

struct degenerate_solution_error : error {
    explicit degenerate_solution_error(const std::string& what)
        : error("DegenerateSolution", what) {}
};

struct quadrature_failure_error : error {
    explicit quadrature_failure_error(const std::string& what)
        : error("QuadratureFailure", what) {}
};

struct decay_class_violation_error : error {
    explicit decay_class_violation_error(const std::string& what)
        : error("DecayClassViolation", what) {}
};

struct regularization_unsupported_error : error {
    explicit regularization_unsupported_error(const std::string& what)
        : error("RegularizationUnsupported", what) {}
};

struct kernel_domain_error : error {
    explicit kernel_domain_error(const std::string& what)
        : error("KernelDomainExceeded", what) {}
};

struct all_moments_vanish_error : error {
    explicit all_moments_vanish_error(const std::string& what)
        : error("AllMomentsVanish", what) {}
};

struct tail_too_short_error : error {
    explicit tail_too_short_error(const std::string& what)
        : error("TailTooShort", what) {}
};

struct precondition_violation_error : error {
    explicit precondition_violation_error(const std::string& what)
        : error("PreconditionViolation", what) {}
};

struct invalid_argument_error : error {
    explicit invalid_argument_error(const std::string& what)
        : error("InvalidArgument", what) {}
};

}  // namespace dispersionlab
