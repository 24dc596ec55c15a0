#pragma once

#include <stdexcept>
#include <string>

namespace vinecredit {

// Parameter outside a copula family's admissible box, or an invalid family/rotation pairing.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Violated precondition on caller-supplied data or sizes.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Root finding, optimisation or quadrature failed to converge.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input file or missing artifact.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace vinecredit
