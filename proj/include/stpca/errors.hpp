#pragma once

#include <stdexcept>
#include <string>

namespace stpca {

/// Parameters violate a documented precondition (k > n, r < 2, ...).
class InvalidParameters : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A search state is not valid for the requested operation.
class InvalidState : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation is only defined for some tensor orders (e.g. homotopy needs odd r).
class UnsupportedOrder : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace stpca
