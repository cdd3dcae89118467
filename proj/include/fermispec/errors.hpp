#pragma once

#include <stdexcept>
#include <string>

namespace fermispec {

/// Thrown when a request would exceed an enumeration or memory guard.
/// The CLI maps this to exit code 2.
class ResourceGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative solver ran out of sweeps before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fermispec
