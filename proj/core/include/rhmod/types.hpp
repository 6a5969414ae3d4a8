#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace rhmod {

using cplx = std::complex<double>;

inline constexpr double PI = 3.14159265358979323846;

// Error raised when an evaluation hits a declared singularity, a contour,
// or otherwise leaves the domain of validity.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Error raised when a numerical procedure fails to meet its target
// (quadrature budget exhausted, singular linear system, Newton divergence).
class NumericsError : public std::runtime_error {
public:
    explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace rhmod
