#pragma once

#include <stdexcept>
#include <string>

namespace qnet_asym {

/// A parameter lies outside the domain of the model (negative length, probability > 1, ...).
class InvalidParameter : public std::invalid_argument {
public:
    explicit InvalidParameter(const std::string& what) : std::invalid_argument(what) {}
};

/// The herald never fires (P_succ == 0), so the post-success state and its fidelity are undefined.
class NoSuccess : public std::domain_error {
public:
    explicit NoSuccess(const std::string& what) : std::domain_error(what) {}
};

/// Numerical integration could not reach the requested accuracy within its budget.
class QuadratureFailure : public std::runtime_error {
public:
    explicit QuadratureFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qnet_asym
