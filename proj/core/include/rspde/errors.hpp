#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rspde {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad grid, bad size, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A function was evaluated outside of its mathematical domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The constant M is undefined when the diffusion is constant (L_sigma = 0).
class DegenerateDiffusion : public DomainError {
public:
    using DomainError::DomainError;
};

/// The model lacks derivatives required by the tangent integrator.
class UnsupportedModel : public Error {
public:
    using Error::Error;
};

/// A functional produced a value outside of its declared contract.
class FunctionalContractError : public Error {
public:
    using Error::Error;
};

/// The integrator produced a non-finite value.
class BlowUpError : public Error {
public:
    BlowUpError(std::size_t step, double max_abs, std::size_t stream = 0)
        : Error("integrator blow-up at step " + std::to_string(step) + " (stream " +
                std::to_string(stream) + ", max |u| before step = " + std::to_string(max_abs) + ")"),
          step_(step), max_abs_(max_abs), stream_(stream) {}

    std::size_t step() const noexcept { return step_; }
    double max_abs() const noexcept { return max_abs_; }
    std::size_t stream() const noexcept { return stream_; }

private:
    std::size_t step_;
    double max_abs_;
    std::size_t stream_;
};

}  // namespace rspde
