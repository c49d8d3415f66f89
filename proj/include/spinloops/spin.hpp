#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace spinloops {

using Complex = std::complex<double>;

inline constexpr Complex kImag{0.0, 1.0};

// ---------------------------------------------------------------------------
// Real 3-vectors
// ---------------------------------------------------------------------------

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
    friend Vec3 operator-(const Vec3& v) { return {-v.x, -v.y, -v.z}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(const Vec3& v) {
    const double n = norm(v);
    if (n == 0.0) throw std::invalid_argument("cannot normalize a zero vector");
    return (1.0 / n) * v;
}

// Unit vector on S^2; represents a pure spin-1/2 state.
struct BlochVector {
    double n1 = 0.0, n2 = 0.0, n3 = 1.0;

    Vec3 vec() const { return {n1, n2, n3}; }
    static BlochVector from_vec(const Vec3& v) {
        const Vec3 u = normalized(v);
        return {u.x, u.y, u.z};
    }
};

inline BlochVector bloch_from_angles(double theta, double phi) {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

// ---------------------------------------------------------------------------
// Two-component state vectors
// ---------------------------------------------------------------------------

struct Spinor {
    Complex c_plus{1.0, 0.0};   // component along |+>
    Complex c_minus{0.0, 0.0};  // component along |->

    double norm() const { return std::sqrt(std::norm(c_plus) + std::norm(c_minus)); }

    Spinor normalized() const {
        const double n = norm();
        if (n == 0.0) throw std::invalid_argument("cannot normalize a zero spinor");
        return {c_plus / n, c_minus / n};
    }

    friend Spinor operator*(Complex s, const Spinor& p) { return {s * p.c_plus, s * p.c_minus}; }
    friend Spinor operator+(const Spinor& a, const Spinor& b) {
        return {a.c_plus + b.c_plus, a.c_minus + b.c_minus};
    }
    friend Spinor operator-(const Spinor& a, const Spinor& b) {
        return {a.c_plus - b.c_plus, a.c_minus - b.c_minus};
    }
};

inline Complex inner(const Spinor& a, const Spinor& b) {
    return std::conj(a.c_plus) * b.c_plus + std::conj(a.c_minus) * b.c_minus;
}

// Half-angle parameterization of the initial state:
//   c_plus = cos(theta0/2) e^{-i phi0/2},  c_minus = sin(theta0/2) e^{+i phi0/2}.
inline Spinor spinor_from_angles(double theta0, double phi0) {
    return {std::polar(std::cos(0.5 * theta0), -0.5 * phi0),
            std::polar(std::sin(0.5 * theta0), 0.5 * phi0)};
}

// ---------------------------------------------------------------------------
// 2x2 complex matrices (row major)
// ---------------------------------------------------------------------------

struct Mat2c {
    std::array<Complex, 4> m{Complex{0, 0}, Complex{0, 0}, Complex{0, 0}, Complex{0, 0}};

    Complex& operator()(int r, int c) { return m[static_cast<std::size_t>(2 * r + c)]; }
    const Complex& operator()(int r, int c) const { return m[static_cast<std::size_t>(2 * r + c)]; }

    static Mat2c identity() { return {{Complex{1, 0}, Complex{0, 0}, Complex{0, 0}, Complex{1, 0}}}; }
    static Mat2c zero() { return {}; }

    Mat2c adjoint() const {
        return {{std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])}};
    }

    Complex trace() const { return m[0] + m[3]; }
    Complex det() const { return m[0] * m[3] - m[1] * m[2]; }

    friend Mat2c operator+(const Mat2c& a, const Mat2c& b) {
        return {{a.m[0] + b.m[0], a.m[1] + b.m[1], a.m[2] + b.m[2], a.m[3] + b.m[3]}};
    }
    friend Mat2c operator-(const Mat2c& a, const Mat2c& b) {
        return {{a.m[0] - b.m[0], a.m[1] - b.m[1], a.m[2] - b.m[2], a.m[3] - b.m[3]}};
    }
    friend Mat2c operator*(Complex s, const Mat2c& a) {
        return {{s * a.m[0], s * a.m[1], s * a.m[2], s * a.m[3]}};
    }
    friend Mat2c operator*(double s, const Mat2c& a) { return Complex{s, 0.0} * a; }
    friend Mat2c operator*(const Mat2c& a, const Mat2c& b) {
        return {{a.m[0] * b.m[0] + a.m[1] * b.m[2], a.m[0] * b.m[1] + a.m[1] * b.m[3],
                 a.m[2] * b.m[0] + a.m[3] * b.m[2], a.m[2] * b.m[1] + a.m[3] * b.m[3]}};
    }
    friend Spinor operator*(const Mat2c& a, const Spinor& p) {
        return {a.m[0] * p.c_plus + a.m[1] * p.c_minus, a.m[2] * p.c_plus + a.m[3] * p.c_minus};
    }
};

// Largest entry magnitude; the deviation measure used throughout the tests.
inline double max_abs(const Mat2c& a) {
    double r = 0.0;
    for (const auto& e : a.m) r = std::max(r, std::abs(e));
    return r;
}

inline Mat2c commutator(const Mat2c& a, const Mat2c& b) { return a * b - b * a; }

inline double unitarity_defect(const Mat2c& u) {
    return max_abs(u.adjoint() * u - Mat2c::identity());
}

inline Mat2c sigma1() { return {{Complex{0, 0}, Complex{1, 0}, Complex{1, 0}, Complex{0, 0}}}; }
inline Mat2c sigma2() { return {{Complex{0, 0}, Complex{0, -1}, Complex{0, 1}, Complex{0, 0}}}; }
inline Mat2c sigma3() { return {{Complex{1, 0}, Complex{0, 0}, Complex{0, 0}, Complex{-1, 0}}}; }

inline Mat2c pauli_dot(const Vec3& v) {
    return {{Complex{v.z, 0.0}, Complex{v.x, -v.y}, Complex{v.x, v.y}, Complex{-v.z, 0.0}}};
}

// exp(+i angle (axis . sigma) / 2) = cos(angle/2) I + i sin(angle/2) (axis . sigma).
// On the Bloch sphere this acts as the right-handed rotation by -angle about axis.
inline Mat2c pauli_exp(const Vec3& axis, double angle) {
    if (std::abs(norm(axis) - 1.0) > 1e-9)
        throw std::invalid_argument("pauli_exp: axis must be a unit vector");
    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    return {{Complex{c, s * axis.z}, Complex{s * axis.y, s * axis.x},
             Complex{-s * axis.y, s * axis.x}, Complex{c, -s * axis.z}}};
}

// State -> Bloch-vector (Hopf) map: n_k = <psi| sigma_k |psi>. Invariant under
// a global phase of psi.
inline BlochVector hopf_map(const Spinor& psi) {
    if (std::abs(psi.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("hopf_map: spinor must be normalized");
    const Complex cross_term = std::conj(psi.c_plus) * psi.c_minus;
    const Vec3 n{2.0 * cross_term.real(), 2.0 * cross_term.imag(),
                 std::norm(psi.c_plus) - std::norm(psi.c_minus)};
    return BlochVector::from_vec(n);
}

// ---------------------------------------------------------------------------
// 3x3 real matrices (row major)
// ---------------------------------------------------------------------------

struct Mat3 {
    std::array<double, 9> m{0, 0, 0, 0, 0, 0, 0, 0, 0};

    double& operator()(int r, int c) { return m[static_cast<std::size_t>(3 * r + c)]; }
    const double& operator()(int r, int c) const { return m[static_cast<std::size_t>(3 * r + c)]; }

    static Mat3 identity() { return {{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }

    Mat3 transposed() const {
        return {{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
    }

    double det() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
    }

    friend Mat3 operator*(const Mat3& a, const Mat3& b) {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
                r(i, j) = s;
            }
        return r;
    }
    friend Mat3 operator-(const Mat3& a, const Mat3& b) {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[static_cast<std::size_t>(i)] =
            a.m[static_cast<std::size_t>(i)] - b.m[static_cast<std::size_t>(i)];
        return r;
    }
    friend Vec3 operator*(const Mat3& a, const Vec3& v) {
        return {a.m[0] * v.x + a.m[1] * v.y + a.m[2] * v.z,
                a.m[3] * v.x + a.m[4] * v.y + a.m[5] * v.z,
                a.m[6] * v.x + a.m[7] * v.y + a.m[8] * v.z};
    }
};

inline double max_abs(const Mat3& a) {
    double r = 0.0;
    for (double e : a.m) r = std::max(r, std::abs(e));
    return r;
}

inline double rotation_defect(const Mat3& r) {
    return std::max(max_abs(r.transposed() * r - Mat3::identity()), std::abs(r.det() - 1.0));
}

// Right-handed finite rotation by `angle` about coordinate axis 1, 2 or 3
// (i, j, k). rot3(3, pi/2) maps i to j.
inline Mat3 rot3(int axis_index, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    switch (axis_index) {
        case 1:
            return {{1, 0, 0, 0, c, -s, 0, s, c}};
        case 2:
            return {{c, 0, s, 0, 1, 0, -s, 0, c}};
        case 3:
            return {{c, -s, 0, s, c, 0, 0, 0, 1}};
        default:
            throw std::invalid_argument("rot3: axis_index must be 1, 2 or 3");
    }
}

}  // namespace spinloops
