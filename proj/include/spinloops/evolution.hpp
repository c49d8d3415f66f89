#pragma once

#include <cmath>

#include "fields.hpp"
#include "spin.hpp"

namespace spinloops {

// H(t) = -b(t) . S = -(1/2)(b1 sigma1 + b2 sigma2 + b3 sigma3); traceless Hermitian.
inline Mat2c hamiltonian(const FieldSpec& spec, double t) {
    return -0.5 * pauli_dot(field_at(spec, t).vec());
}

// Hamiltonian in the frame rotating with angular velocity beta_dot about k:
//   H_eff(t) = -(1/2) alpha_dot(t) (sin chi sigma1 + cos chi sigma3).
// Self-commuting at all pairs of times, hence exactly integrable.
inline Mat2c effective_hamiltonian(const FieldSpec& spec, double t) {
    return (-0.5 * spec.alpha_dot_at(t)) * pauli_dot(spec.axis());
}

// Rotating-frame propagator W(t) = exp(+i alpha(t) (e_chi . sigma) / 2);
// W(0) = I because alpha(0) = 0.
inline Mat2c propagator_rotating(const FieldSpec& spec, double t) {
    return pauli_exp(spec.axis(), spec.alpha_at(t));
}

struct PropagatorSample {
    Mat2c U;
    double t = 0.0;
};

// Lab-frame propagator U(t) = exp(-i beta(t) sigma3 / 2) W(t).
inline PropagatorSample propagator(const FieldSpec& spec, double t) {
    const Mat2c frame = pauli_exp(Vec3{0.0, 0.0, 1.0}, -spec.beta_at(t));
    return {frame * propagator_rotating(spec, t), t};
}

inline Spinor evolve(const FieldSpec& spec, const Spinor& psi0, double t) {
    return propagator(spec, t).U * psi0;
}

// Spin-flip probability from the initial state along +k:
//   P_{+ -> -}(t) = [1 - n3(t)] / 2 = sin^2(chi) sin^2(alpha(t)/2).
// Exact for arbitrary alpha(t); reduces to Rabi's formula for alpha = alpha0 t.
inline double transition_probability(const FieldSpec& spec, double t) {
    const double s = spec.sin_chi() * std::sin(0.5 * spec.alpha_at(t));
    return s * s;
}

}  // namespace spinloops
