#pragma once

#include <stdexcept>
#include <string>

namespace mimoae {

/// Bad arguments or malformed numeric input (NaN/Inf, dimension mismatch).
class InvalidInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Channel matrix is (numerically) rank deficient where full rank is required.
class SingularChannelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A file does not conform to its on-disk format.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, std::size_t update)
        : std::runtime_error(what), update_index(update) {}
    std::size_t update_index;
};

/// Operation is not defined for this constellation (e.g. closed-form SER of a
/// learned shape).
class UnsupportedConstellationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Batch of transmit vectors is all zero; the power constraint cannot be
/// enforced by scaling.
class DegenerateBatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Channel vector is zero; detection statistics are undefined.
class DegenerateChannelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No constellation-size factorization of M exists within the catalog.
class InfeasibleAllocationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mimoae
