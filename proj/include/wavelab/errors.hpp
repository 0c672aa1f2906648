#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wavelab {

/// Domain violation for scalar helpers (negative arguments to phi, D, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Adaptive quadrature failed to reach its tolerance.
class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A lattice does not cover the backward cone it is asked to integrate over,
/// or two lattices do not share geometry.
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Picard iterates left the 4*M*eps ball.
class IterationDiverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Picard iteration hit its cap without meeting the tolerance.
class IterationStagnated : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The marching scheme produced a non-finite value.
class NumericalOverflow : public std::runtime_error {
public:
    NumericalOverflow(const std::string& what, std::size_t row)
        : std::runtime_error(what), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Blow-up history tail is too short or not monotone.
class ExtrapolationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Not enough uncensored records for a fit.
class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad command line or config file (exit code 2).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable input or unwritable output (exit code 3).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace wavelab
