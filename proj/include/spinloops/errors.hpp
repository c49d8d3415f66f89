#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spinloops {

// Text could not be parsed as a time function; `position` is the byte
// offset of the first offending character.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

// The inverse construction divides by n3; it has no continuation through
// the equator of the Bloch sphere.
class PoleSingularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input (n, n_dot) pair is not tangent to the sphere.
class NonTangentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Solid-angle integrand 1/(1+n3) blows up at the south pole.
class SouthPoleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Trajectory endpoints do not coincide.
class OpenCurveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Requested a loop-only computation at an instant that fails the loop
// conditions.
class NotALoopError : public std::runtime_error {
public:
    NotALoopError(const std::string& what, double residual_alpha, double residual_beta)
        : std::runtime_error(what),
          residual_alpha_(residual_alpha),
          residual_beta_(residual_beta) {}

    double residual_alpha() const noexcept { return residual_alpha_; }
    double residual_beta() const noexcept { return residual_beta_; }

private:
    double residual_alpha_;
    double residual_beta_;
};

// Adaptive quadrature hit its subdivision limit before reaching the
// requested tolerance.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved_estimate)
        : std::runtime_error(what), achieved_estimate_(achieved_estimate) {}

    double achieved_estimate() const noexcept { return achieved_estimate_; }

private:
    double achieved_estimate_;
};

// Scenario/config file problems (missing keys, contradictory keys, ...).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace spinloops
