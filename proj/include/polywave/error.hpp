#pragma once

#include <stdexcept>
#include <string>

namespace polywave {

/// Invalid input: malformed files, violated preconditions, bad parameters.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical procedure failed (factorization, convergence, quadrature).
/// `module()` names the component that gave up.
class NumericalError : public std::runtime_error {
public:
    NumericalError(std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

} // namespace polywave
