#pragma once

#include <stdexcept>
#include <string>

namespace blink {

/// Thrown when the adaptive step size collapses below the resolvable floor.
/// Carries the last time the integrator reached before giving up.
class StagnationError : public std::runtime_error {
public:
    StagnationError(double t_reached, const std::string& what)
        : std::runtime_error(what), t_reached_(t_reached) {}
    double t_reached() const { return t_reached_; }

private:
    double t_reached_;
};

/// Thin-film diffusivity evaluated at a nonpositive thickness; the solution
/// is about to break down.
class NonpositiveThicknessError : public std::runtime_error {
public:
    explicit NonpositiveThicknessError(double h)
        : std::runtime_error("thin-film diffusivity evaluated at nonpositive thickness h="
                             + std::to_string(h)),
          h_(h) {}
    double thickness() const { return h_; }

private:
    double h_;
};

class NumericalBreakdownError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class DegenerateDomainError : public std::domain_error {
    using std::domain_error::domain_error;
};

class InconsistentInitialDataError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class JacobianEvalError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace blink
