#pragma once

#include <stdexcept>
#include <string>

namespace sfl {

enum class ErrorKind {
    Domain,
    Precondition,
    Input,
    Convergence,
    Region,
    Numerical,
    Frame,
    Schedule,
};

/// Base of every error raised by the library; `kind()` drives CLI exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error(ErrorKind::Domain, w) {}
};
struct PreconditionError : Error {
    explicit PreconditionError(const std::string& w) : Error(ErrorKind::Precondition, w) {}
};
struct InputError : Error {
    explicit InputError(const std::string& w) : Error(ErrorKind::Input, w) {}
};
struct RegionError : Error {
    explicit RegionError(const std::string& w) : Error(ErrorKind::Region, w) {}
};
struct NumericalError : Error {
    explicit NumericalError(const std::string& w) : Error(ErrorKind::Numerical, w) {}
};
struct FrameError : Error {
    explicit FrameError(const std::string& w) : Error(ErrorKind::Frame, w) {}
};
struct ScheduleError : Error {
    explicit ScheduleError(const std::string& w) : Error(ErrorKind::Schedule, w) {}
};

/// Nonlinear solve gave up; carries the last residual and iteration count.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& w, double residual, int iterations)
        : Error(ErrorKind::Convergence,
                w + " (residual " + std::to_string(residual) + " after " +
                    std::to_string(iterations) + " iterations)"),
          residual_(residual), iterations_(iterations) {}
    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

}  // namespace sfl
