#pragma once

#include <cmath>
#include <numbers>
#include <utility>

#include "errors.hpp"
#include "spin.hpp"
#include "timefn.hpp"

namespace spinloops {

// hbar = 1 and b(t) = mu B(t) throughout; fields carry angular-frequency units.
struct FieldSample {
    double b1 = 0.0, b2 = 0.0, b3 = 0.0;

    Vec3 vec() const { return {b1, b2, b3}; }
};

// The two-axis family: n(t) rotates simultaneously about k with angle beta(t)
// and about e_chi = (sin chi, 0, cos chi) with angle alpha(t). alpha and beta
// must vanish at t = 0; chi lies in [0, pi].
class FieldSpec {
public:
    FieldSpec(TimeFn alpha, TimeFn beta, double chi)
        : alpha_(std::move(alpha)),
          beta_(std::move(beta)),
          alpha_dot_(alpha_.derivative()),
          beta_dot_(beta_.derivative()),
          chi_(chi) {
        if (std::abs(alpha_(0.0)) > 1e-12 || std::abs(beta_(0.0)) > 1e-12)
            throw std::invalid_argument("FieldSpec: alpha(0) and beta(0) must vanish");
        if (!(chi >= 0.0 && chi <= std::numbers::pi))
            throw std::invalid_argument("FieldSpec: chi must lie in [0, pi]");
    }

    const TimeFn& alpha() const noexcept { return alpha_; }
    const TimeFn& beta() const noexcept { return beta_; }
    double chi() const noexcept { return chi_; }

    double alpha_at(double t) const { return alpha_(t); }
    double beta_at(double t) const { return beta_(t); }
    double alpha_dot_at(double t) const { return alpha_dot_(t); }
    double beta_dot_at(double t) const { return beta_dot_(t); }

    double sin_chi() const noexcept { return std::sin(chi_); }
    double cos_chi() const noexcept { return std::cos(chi_); }
    Vec3 axis() const noexcept { return {sin_chi(), 0.0, cos_chi()}; }

private:
    TimeFn alpha_;
    TimeFn beta_;
    TimeFn alpha_dot_;
    TimeFn beta_dot_;
    double chi_;
};

// b(t) = alpha_dot sin(chi) (cos beta, sin beta, 0) + (alpha_dot cos(chi) - beta_dot) k.
inline FieldSample field_at(const FieldSpec& spec, double t) {
    const double alpha_dot = spec.alpha_dot_at(t);
    const double beta = spec.beta_at(t);
    const double planar = alpha_dot * spec.sin_chi();
    return {planar * std::cos(beta), planar * std::sin(beta),
            alpha_dot * spec.cos_chi() - spec.beta_dot_at(t)};
}

// Solve b3(t) + beta_dot(t) = alpha_dot(t) cos(chi) for beta with beta(0) = 0.
// Exact term-wise antidifferentiation; no quadrature involved.
inline TimeFn beta_from_b3(const TimeFn& alpha, const TimeFn& b3, double chi) {
    const TimeFn integrand = alpha.derivative().scaled(std::cos(chi)) - b3;
    return integrand.antiderivative();
}

// R(t) = R3(beta) R2^{-1}(-chi) R3(-alpha) R2(-chi); equals the composition of
// a rotation by -alpha(t) about e_chi followed by a rotation by beta(t) about k.
inline Mat3 rotation_at(const FieldSpec& spec, double t) {
    return rot3(3, spec.beta_at(t)) * rot3(2, spec.chi()) * rot3(3, -spec.alpha_at(t)) *
           rot3(2, -spec.chi());
}

inline constexpr double kPoleEpsilon = 1e-6;     // |n3| floor for the inverse construction
inline constexpr double kTangencyTol = 1e-8;     // |n . n_dot| bound

// Invert the precession equation n_dot = -b x n for the transverse field
// components, given the trajectory point, its velocity and a chosen b3:
//   b1 = (b3 n1 + n_dot2) / n3,   b2 = (b3 n2 - n_dot1) / n3.
inline FieldSample inverse_field(const BlochVector& n, const Vec3& n_dot, double b3) {
    const Vec3 nv = n.vec();
    if (std::abs(norm(nv) - 1.0) > 1e-9)
        throw std::invalid_argument("inverse_field: n must be a unit vector");
    if (std::abs(dot(nv, n_dot)) > kTangencyTol)
        throw NonTangentError("inverse_field: n_dot is not tangent to the sphere");
    if (std::abs(n.n3) < kPoleEpsilon)
        throw PoleSingularityError("inverse_field: |n3| too small, field is not recoverable");
    return {(b3 * n.n1 + n_dot.y) / n.n3, (b3 * n.n2 - n_dot.x) / n.n3, b3};
}

}  // namespace spinloops
