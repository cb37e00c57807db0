#pragma once

#include <stdexcept>
#include <string>

namespace halfline {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid construction parameters (bounds, counts, scales).
struct parameter_error : error {
    using error::error;
};

/// Operands live on different grids or have incompatible shapes.
struct structural_error : error {
    using error::error;
};

/// Evaluation at a pole of a special function.
struct pole_error : error {
    pole_error(const std::string& msg, long offending) : error(msg), offending_integer(offending) {}
    long offending_integer;
};

/// Result magnitude not representable; the log-value is still meaningful.
struct range_error : error {
    range_error(const std::string& msg, double log_val) : error(msg), log_value(log_val) {}
    double log_value;
};

/// Quadrature/truncation accuracy contract cannot be met.
struct accuracy_error : error {
    accuracy_error(const std::string& msg, double measured) : error(msg), measured_magnitude(measured) {}
    double measured_magnitude;
};

/// Sampling too coarse to resolve the requested feature.
struct resolution_error : error {
    using error::error;
};

/// Integration window does not cover the required mass.
struct coverage_error : error {
    coverage_error(const std::string& msg, double boundary) : error(msg), boundary_mass(boundary) {}
    double boundary_mass;
};

/// Complex-power argument left the principal-branch domain.
struct branch_error : error {
    using error::error;
};

/// Argument outside the operation's domain (e.g. a + 2*alpha <= 0).
struct domain_error : error {
    using error::error;
};

/// Input fails a validity precondition (e.g. non-Hermitian Hamiltonian).
struct validity_error : error {
    validity_error(const std::string& msg, double measured) : error(msg), measured_defect(measured) {}
    double measured_defect;
};

/// Malformed configuration input.
struct config_error : error {
    using error::error;
};

} // namespace halfline
