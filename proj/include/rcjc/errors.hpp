// errors.hpp — Exception types shared by every module.
#pragma once

#include <stdexcept>
#include <string>

namespace rcjc {

// Precondition violations: bad dimensions, non-Hermitian input, bad parameters.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Runtime guards: truncation tail, trace drift, NaN, ill-conditioning.
class NumericalGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or unresolvable scenario configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rcjc
