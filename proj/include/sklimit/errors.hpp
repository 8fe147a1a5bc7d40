#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sklimit {

/// Quadrature non-convergence, non-finite solver state and similar failures of
/// a numerical procedure on otherwise valid input.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Time stepping produced a non-finite state.
class NonFiniteStateError : public NumericalError {
public:
    NonFiniteStateError(const std::string& what, std::size_t step)
        : NumericalError(what + " (step " + std::to_string(step) + ")"), step_(step) {}

    [[nodiscard]] std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Two objects that must share a grid (time grid, basis, path) do not.
class GridMismatchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace sklimit
