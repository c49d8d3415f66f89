#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fields.hpp"
#include "spin.hpp"

namespace spinloops {

template <typename F>
concept FieldFunction = requires(F f, double t) {
    { f(t) } -> std::convertible_to<FieldSample>;
};

template <typename F>
concept RealFunction = requires(F f, double t) {
    { f(t) } -> std::convertible_to<double>;
};

// Uniformly sampled evolution history. `max_renorm_drift` is the largest
// per-step norm deviation seen before renormalization; it stays tiny for a
// healthy integration and is asserted small inside the steppers.
template <typename State>
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    double max_renorm_drift = 0.0;

    std::size_t size() const noexcept { return times.size(); }
    double step() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

namespace detail {

inline constexpr double kDriftHardLimit = 1e-6;

struct SpinorState {
    Complex up, down;

    friend SpinorState operator+(const SpinorState& a, const SpinorState& b) {
        return {a.up + b.up, a.down + b.down};
    }
    friend SpinorState operator*(double s, const SpinorState& a) { return {s * a.up, s * a.down}; }
};

// psi_dot = -i H psi with H = -(b . sigma)/2, i.e. psi_dot = (i/2)(b . sigma) psi.
inline SpinorState schrodinger_rhs(const FieldSample& b, const SpinorState& psi) {
    if (!std::isfinite(b.b1) || !std::isfinite(b.b2) || !std::isfinite(b.b3))
        throw std::invalid_argument("integrate: field sample is not finite");
    const Complex half_i{0.0, 0.5};
    return {half_i * (b.b3 * psi.up + Complex{b.b1, -b.b2} * psi.down),
            half_i * (Complex{b.b1, b.b2} * psi.up - b.b3 * psi.down)};
}

// n_dot = -b x n.
inline Vec3 bloch_rhs(const FieldSample& b, const Vec3& n) {
    if (!std::isfinite(b.b1) || !std::isfinite(b.b2) || !std::isfinite(b.b3))
        throw std::invalid_argument("integrate: field sample is not finite");
    return -1.0 * cross(b.vec(), n);
}

template <typename State, typename Rhs>
State rk4_step(const Rhs& rhs, double t, double h, const State& y) {
    const State k1 = rhs(t, y);
    const State k2 = rhs(t + 0.5 * h, y + (0.5 * h) * k1);
    const State k3 = rhs(t + 0.5 * h, y + (0.5 * h) * k2);
    const State k4 = rhs(t + h, y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

// Classic fixed-step 4th-order integration of the Schrodinger equation,
// renormalizing each step. Fixed step size; identical inputs give
// bit-identical trajectories.
template <FieldFunction F>
Trajectory<Spinor> integrate_schrodinger(F&& field, const Spinor& psi0, double t_end, int steps) {
    if (steps < 1) throw std::invalid_argument("integrate_schrodinger: steps must be >= 1");
    if (!(t_end > 0.0)) throw std::invalid_argument("integrate_schrodinger: t_end must be > 0");

    Trajectory<Spinor> traj;
    traj.times.reserve(static_cast<std::size_t>(steps) + 1);
    traj.states.reserve(static_cast<std::size_t>(steps) + 1);

    const double h = t_end / steps;
    detail::SpinorState y{psi0.c_plus, psi0.c_minus};
    auto rhs = [&field](double t, const detail::SpinorState& s) {
        return detail::schrodinger_rhs(field(t), s);
    };

    traj.times.push_back(0.0);
    traj.states.push_back(psi0);
    for (int i = 0; i < steps; ++i) {
        const double t = i * h;
        y = detail::rk4_step(rhs, t, h, y);
        const double nrm = std::sqrt(std::norm(y.up) + std::norm(y.down));
        const double drift = std::abs(nrm - 1.0);
        traj.max_renorm_drift = std::max(traj.max_renorm_drift, drift);
        if (drift > detail::kDriftHardLimit)
            throw std::runtime_error(
                "integrate_schrodinger: norm drift " + std::to_string(drift) +
                " exceeds hard limit; increase steps");
        y.up /= nrm;
        y.down /= nrm;
        traj.times.push_back((i + 1) * h);
        traj.states.push_back(Spinor{y.up, y.down});
    }
    return traj;
}

// Same stepper for the precession equation n_dot = -b(t) x n.
template <FieldFunction F>
Trajectory<BlochVector> integrate_bloch(F&& field, const BlochVector& n0, double t_end, int steps) {
    if (steps < 1) throw std::invalid_argument("integrate_bloch: steps must be >= 1");
    if (!(t_end > 0.0)) throw std::invalid_argument("integrate_bloch: t_end must be > 0");
    if (std::abs(norm(n0.vec()) - 1.0) > 1e-9)
        throw std::invalid_argument("integrate_bloch: n0 must be a unit vector");

    Trajectory<BlochVector> traj;
    traj.times.reserve(static_cast<std::size_t>(steps) + 1);
    traj.states.reserve(static_cast<std::size_t>(steps) + 1);

    const double h = t_end / steps;
    Vec3 y = n0.vec();
    auto rhs = [&field](double t, const Vec3& n) { return detail::bloch_rhs(field(t), n); };

    traj.times.push_back(0.0);
    traj.states.push_back(n0);
    for (int i = 0; i < steps; ++i) {
        const double t = i * h;
        y = detail::rk4_step(rhs, t, h, y);
        const double nrm = norm(y);
        const double drift = std::abs(nrm - 1.0);
        traj.max_renorm_drift = std::max(traj.max_renorm_drift, drift);
        if (drift > detail::kDriftHardLimit)
            throw std::runtime_error("integrate_bloch: norm drift " + std::to_string(drift) +
                                     " exceeds hard limit; increase steps");
        y = (1.0 / nrm) * y;
        traj.times.push_back((i + 1) * h);
        traj.states.push_back(BlochVector{y.x, y.y, y.z});
    }
    return traj;
}

namespace detail {

template <typename Fn>
double adaptive_simpson(const Fn& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth, int min_depth, double& worst_estimate) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth >= min_depth && std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    if (depth >= 40) {
        worst_estimate = std::max(worst_estimate, std::abs(delta) / 15.0);
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, min_depth,
                            worst_estimate) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, min_depth,
                            worst_estimate);
}

}  // namespace detail

// Adaptive Simpson quadrature with absolute-error target `tol`. Deterministic
// for fixed inputs. A minimum recursion depth protects against symmetric
// integrands whose coarse Simpson estimates cancel exactly.
template <RealFunction Fn>
double quad(Fn&& f, double a, double b, double tol) {
    if (!(a <= b)) throw std::invalid_argument("quad: require a <= b");
    if (!(tol > 0.0)) throw std::invalid_argument("quad: tolerance must be positive");
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double worst_estimate = 0.0;
    const double result =
        detail::adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 0, 4, worst_estimate);
    if (worst_estimate > tol)
        throw QuadratureError("quad: subdivision limit exceeded, achieved error estimate " +
                                  std::to_string(worst_estimate),
                              worst_estimate);
    return result;
}

namespace detail {

// Power series of the Fresnel cosine integral, accurate to ~1e-13 for |x| <= 2.
inline double fresnel_c_series(double x) {
    const double u = 0.5 * std::numbers::pi * x * x;
    const double u2 = u * u;
    double c = 1.0;  // (-1)^n u^{2n} / (2n)!
    double sum = 1.0;
    for (int n = 0; n < 200; ++n) {
        c *= -u2 / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
        const double inc = c / (4.0 * n + 5.0);
        sum += inc;
        if (std::abs(inc) < 1e-17 * (1.0 + std::abs(sum))) break;
    }
    return x * sum;
}

// Faddeeva function w(z) = e^{-z^2} erfc(-iz) for Im z > 0, via the Laplace
// continued fraction evaluated with the modified Lentz algorithm.
inline Complex faddeeva_cf(Complex z) {
    constexpr double tiny = 1e-300;
    Complex f{tiny, 0.0};
    Complex C = f;
    Complex D{0.0, 0.0};
    for (int k = 1; k <= 400; ++k) {
        const Complex a = (k == 1) ? Complex{1.0, 0.0} : Complex{-0.5 * (k - 1), 0.0};
        D = z + a * D;
        if (D == Complex{0.0, 0.0}) D = Complex{tiny, 0.0};
        D = 1.0 / D;
        C = z + a / C;
        if (C == Complex{0.0, 0.0}) C = Complex{tiny, 0.0};
        const Complex delta = C * D;
        f *= delta;
        if (std::abs(delta - Complex{1.0, 0.0}) < 1e-16) break;
    }
    return Complex{0.0, 1.0} / std::sqrt(std::numbers::pi) * f;
}

}  // namespace detail

// Fresnel cosine integral C(x) = int_0^x cos(pi u^2 / 2) du. Odd in x;
// C(x) -> 1/2 as x -> +inf. Power series below |x| = 2, continued fraction
// above; both branches agree to ~1e-13 at the crossover.
inline double fresnel_c(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("fresnel_c: x must be finite");
    const double ax = std::abs(x);
    double value;
    if (ax <= 2.0) {
        value = detail::fresnel_c_series(ax);
    } else {
        // C(x) + i S(x) = (1+i)/2 [1 - e^{i pi x^2/2} w(zeta)], zeta = sqrt(pi)/2 (1+i) x.
        const double half_sqrt_pi = 0.5 * std::sqrt(std::numbers::pi);
        const Complex zeta{half_sqrt_pi * ax, half_sqrt_pi * ax};
        const Complex w = detail::faddeeva_cf(zeta);
        const Complex rot = std::polar(1.0, 0.5 * std::numbers::pi * ax * ax);
        const Complex e = 0.5 * Complex{1.0, 1.0} * (1.0 - rot * w);
        value = e.real();
    }
    return x < 0.0 ? -value : value;
}

}  // namespace spinloops
