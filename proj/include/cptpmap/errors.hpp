#pragma once

#include <stdexcept>
#include <string>

namespace cptpmap {

/// Input state pairs whose Bloch vectors are parallel or antiparallel have no
/// well-defined (R, X, Y0) parameterization.
class degenerate_geometry_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised for parameter combinations that collapse a formula (e.g. Z = 1
/// without the limit flag).
class degenerate_input_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when an operation is only defined for a restricted configuration
/// (e.g. the intercept-resend strategy at xi = 1/2).
class unsupported_configuration_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iterative routine failed to converge or to bracket its target.
class numeric_failure_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cptpmap
