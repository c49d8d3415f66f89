#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "errors.hpp"
#include "evolution.hpp"
#include "fields.hpp"
#include "integrate.hpp"
#include "spin.hpp"

namespace spinloops {

inline constexpr double kDefaultLoopTol = 1e-9;   // rad, on both winding residuals
inline constexpr double kSouthPoleEpsilon = 1e-4; // floor on 1 + n3 in the solid-angle gauge
inline constexpr double kClosureTol = 1e-6;       // endpoint mismatch for closed curves
inline constexpr double kPhaseQuadTol = 1e-12;    // quadrature target for the phase integrals

// Loop classification at time tau: alpha(tau) = 2 ell pi and beta(tau) = 2 m pi
// make every initial state return to itself up to the sign (-1)^{ell+m}; the
// strong condition additionally requires ell + m even, so that U(tau) = +I.
struct LoopReport {
    double tau = 0.0;
    long ell = 0;
    long m = 0;
    bool is_loop = false;
    bool is_strong = false;
    double residual_alpha = 0.0;
    double residual_beta = 0.0;
};

inline LoopReport check_loop(const FieldSpec& spec, double tau, double tol = kDefaultLoopTol) {
    if (!(tau > 0.0)) throw std::invalid_argument("check_loop: tau must be > 0");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double alpha = spec.alpha_at(tau);
    const double beta = spec.beta_at(tau);
    LoopReport report;
    report.tau = tau;
    report.ell = std::lround(alpha / two_pi);
    report.m = std::lround(beta / two_pi);
    report.residual_alpha = std::abs(alpha - two_pi * static_cast<double>(report.ell));
    report.residual_beta = std::abs(beta - two_pi * static_cast<double>(report.m));
    report.is_loop = report.residual_alpha <= tol && report.residual_beta <= tol;
    report.is_strong = report.is_loop && (report.ell + report.m) % 2 == 0;
    return report;
}

enum class PhaseMethod { Numeric, ClosedForm, Eigenpath };

struct PhaseResult {
    double gamma = 0.0;            // raw, unreduced value
    double gamma_principal = 0.0;  // reduced to (-pi, pi]
    double solid_angle = 0.0;      // oriented, gamma = -solid_angle/2
    PhaseMethod method = PhaseMethod::Numeric;
};

inline double principal_angle(double angle) {
    double p = std::remainder(angle, 2.0 * std::numbers::pi);
    if (p <= -std::numbers::pi) p += 2.0 * std::numbers::pi;
    return p;
}

// Distance between two angles on the circle.
inline double angle_distance(double a, double b) {
    return std::abs(std::remainder(a - b, 2.0 * std::numbers::pi));
}

namespace detail {

inline PhaseResult make_phase(double gamma, double solid_angle, PhaseMethod method) {
    return {gamma, principal_angle(gamma), solid_angle, method};
}

// Composite quadrature of uniformly sampled values: Simpson, with a 3/8 tail
// when the interval count is odd.
inline double composite_integral(const std::vector<double>& values, double h) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    std::size_t intervals = n - 1;
    if (intervals == 1) return 0.5 * h * (values[0] + values[1]);
    if (intervals == 2) return h / 3.0 * (values[0] + 4.0 * values[1] + values[2]);

    double sum = 0.0;
    std::size_t simpson_end = intervals;  // index of last point covered by pairwise Simpson
    if (intervals % 2 != 0) simpson_end = intervals - 3;
    for (std::size_t i = 0; i + 2 <= simpson_end; i += 2)
        sum += h / 3.0 * (values[i] + 4.0 * values[i + 1] + values[i + 2]);
    if (intervals % 2 != 0) {
        const std::size_t i = simpson_end;
        sum += 3.0 * h / 8.0 *
               (values[i] + 3.0 * values[i + 1] + 3.0 * values[i + 2] + values[i + 3]);
    }
    return sum;
}

}  // namespace detail

// Oriented solid angle of a closed Bloch trajectory in the north-pole gauge,
//   solid_angle = int (n1 n2_dot - n2 n1_dot) / (1 + n3) dt,
// with the velocities supplied by the caller (exact -b x n samples for field
// driven curves). Singular on trajectories through the south pole.
inline double solid_angle(const Trajectory<BlochVector>& traj, const std::vector<Vec3>& velocities) {
    if (traj.size() < 2) throw std::invalid_argument("solid_angle: trajectory too short");
    if (velocities.size() != traj.size())
        throw std::invalid_argument("solid_angle: one velocity sample per trajectory point");

    const Vec3 gap = traj.states.back().vec() - traj.states.front().vec();
    if (norm(gap) > kClosureTol)
        throw OpenCurveError("solid_angle: trajectory endpoints do not coincide");

    std::vector<double> integrand(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const BlochVector& n = traj.states[i];
        const double denom = 1.0 + n.n3;
        if (denom < kSouthPoleEpsilon)
            throw SouthPoleError("solid_angle: trajectory too close to the south pole at t = " +
                                 std::to_string(traj.times[i]));
        integrand[i] = (n.n1 * velocities[i].y - n.n2 * velocities[i].x) / denom;
    }
    return detail::composite_integral(integrand, traj.step());
}

// Convenience overload: velocities from the precession equation n_dot = -b x n.
template <FieldFunction F>
double solid_angle(const Trajectory<BlochVector>& traj, F&& field) {
    std::vector<Vec3> velocities(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i)
        velocities[i] = -1.0 * cross(field(traj.times[i]).vec(), traj.states[i].vec());
    return solid_angle(traj, velocities);
}

namespace detail {

inline LoopReport require_loop(const FieldSpec& spec, double tau, double tol) {
    const LoopReport report = check_loop(spec, tau, tol);
    if (!report.is_loop)
        throw NotALoopError("loop conditions fail at tau", report.residual_alpha,
                            report.residual_beta);
    return report;
}

}  // namespace detail

// gamma = -solid_angle/2 from the numerically integrated Bloch trajectory.
inline PhaseResult geometric_phase_numeric(const FieldSpec& spec, double theta0, double phi0,
                                           double tau, int steps,
                                           double loop_tol = kDefaultLoopTol) {
    detail::require_loop(spec, tau, loop_tol);
    auto field = [&spec](double t) { return field_at(spec, t); };
    const Trajectory<BlochVector> traj =
        integrate_bloch(field, bloch_from_angles(theta0, phi0), tau, steps);
    const double omega = solid_angle(traj, field);
    return detail::make_phase(-0.5 * omega, omega, PhaseMethod::Numeric);
}

// Closed form for phi0 = 0:
//   gamma = [ell - m + cos(theta0 - chi)(m cos chi - ell)] pi
//           - (1/2) sin chi sin(theta0 - chi) int_0^tau beta_dot(t) cos alpha(t) dt.
inline PhaseResult geometric_phase_closed(const FieldSpec& spec, double theta0, double tau,
                                          double loop_tol = kDefaultLoopTol) {
    const LoopReport loop = detail::require_loop(spec, tau, loop_tol);
    const double ell = static_cast<double>(loop.ell);
    const double m = static_cast<double>(loop.m);
    const double delta = theta0 - spec.chi();
    const double integral = quad(
        [&spec](double t) { return spec.beta_dot_at(t) * std::cos(spec.alpha_at(t)); }, 0.0, tau,
        kPhaseQuadTol);
    const double gamma = (ell - m + std::cos(delta) * (m * spec.cos_chi() - ell)) * std::numbers::pi -
                         0.5 * spec.sin_chi() * std::sin(delta) * integral;
    return detail::make_phase(gamma, -2.0 * gamma, PhaseMethod::ClosedForm);
}

// Constant-b3 specialization: with beta_dot = alpha_dot cos chi - b0 the
// integral term depends on alpha alone,
//   gamma = [ell - m + cos(theta0 - chi)(m cos chi - ell)] pi
//           + (b0/2) sin chi sin(theta0 - chi) int_0^tau cos alpha(t) dt.
inline PhaseResult geometric_phase_b3const(double b0, const TimeFn& alpha, double chi,
                                           double theta0, double tau,
                                           double loop_tol = kDefaultLoopTol) {
    const FieldSpec spec(alpha, beta_from_b3(alpha, TimeFn::constant(b0), chi), chi);
    const LoopReport loop = detail::require_loop(spec, tau, loop_tol);
    const double ell = static_cast<double>(loop.ell);
    const double m = static_cast<double>(loop.m);
    const double delta = theta0 - chi;
    const double integral =
        quad([&spec](double t) { return std::cos(spec.alpha_at(t)); }, 0.0, tau, kPhaseQuadTol);
    const double gamma = (ell - m + std::cos(delta) * (m * spec.cos_chi() - ell)) * std::numbers::pi +
                         0.5 * b0 * spec.sin_chi() * std::sin(delta) * integral;
    return detail::make_phase(gamma, -2.0 * gamma, PhaseMethod::ClosedForm);
}

// States launched along +-e_chi ride the beta rotation only; after n full
// turns about k they subtend solid angle 2 n pi (1 -+ cos chi) and acquire
//   gamma_+- = -n pi (1 -+ cos chi).
enum class EigenpathSign { Plus, Minus };

inline PhaseResult geometric_phase_eigenpath(double chi, long n_turns, EigenpathSign sign) {
    const double axis_term =
        (sign == EigenpathSign::Plus) ? 1.0 - std::cos(chi) : 1.0 + std::cos(chi);
    const double omega = 2.0 * std::numbers::pi * static_cast<double>(n_turns) * axis_term;
    return detail::make_phase(-0.5 * omega, omega, PhaseMethod::Eigenpath);
}

}  // namespace spinloops
