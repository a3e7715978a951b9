#ifndef ZSB_ERRORS_HPP
#define ZSB_ERRORS_HPP

#include <complex>
#include <stdexcept>
#include <string>

namespace zsb {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Transfer-matrix integration could not reach the requested tolerance.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& msg, std::complex<double> lambda)
        : Error(msg), lambda(lambda) {}
    std::complex<double> lambda;
};

/// Eigenvalue localization failed (wrong winding count, no bracket, ...).
class LocalizationError : public Error {
public:
    using Error::Error;
};

/// An iterative solver stagnated; carries the final residual.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, double residual)
        : Error(msg), residual(residual) {}
    double residual;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A quadrature or product evaluation cannot meet its accuracy target.
class AccuracyError : public Error {
public:
    using Error::Error;
};

/// Contour or path construction failed (gap blocking, disc overflow).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Linear system too ill-conditioned to trust.
class ConditioningError : public Error {
public:
    using Error::Error;
};

/// Renormalization removed a divergent quantity that was asked for anyway.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Time stepping detected blow-up.
class InstabilityError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration or input file.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace zsb

#endif
