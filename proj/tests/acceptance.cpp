// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Tolerances are fixed here, not tunable from outside.

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "spinloops/spinloops.hpp"

using namespace spinloops;

namespace {

constexpr double kPi = std::numbers::pi;
const double kChiFresnel = std::acos(0.8);

int g_failures = 0;

void report(int index, const std::string& name, bool passed, double measured, double tol) {
    std::printf("[%s] %02d %-38s measured=%.3e tol=%.0e\n", passed ? "PASS" : "FAIL", index,
                name.c_str(), measured, tol);
    if (!passed) ++g_failures;
}

TimeFn fresnel_alpha() { return parse_timefn("5/(2*pi)*t^2"); }

FieldSpec fresnel_spec() {
    return {fresnel_alpha(), beta_from_b3(fresnel_alpha(), TimeFn::constant(3.0), kChiFresnel),
            kChiFresnel};
}

struct NamedSpec {
    std::string name;
    FieldSpec spec;
};

// Linear, quadratic and sinusoidal drives across the chi set of interest.
std::vector<NamedSpec> propagator_corpus() {
    std::vector<NamedSpec> specs;
    specs.push_back({"linear chi=pi/6", FieldSpec(TimeFn::linear(2.0), TimeFn::linear(1.0), kPi / 6)});
    specs.push_back({"quadratic chi=pi/4",
                     FieldSpec(parse_timefn("t^2"), parse_timefn("0.5*t"), kPi / 4)});
    specs.push_back({"fresnel chi=acos(4/5)", fresnel_spec()});
    specs.push_back({"sin-alpha chi=pi/2",
                     FieldSpec(parse_timefn("t + 0.3*sin(2*t)"), parse_timefn("0.5*t"), kPi / 2)});
    specs.push_back({"sin-beta chi=pi/4",
                     FieldSpec(TimeFn::linear(2.0), parse_timefn("0.7*sin(t)"), kPi / 4)});
    specs.push_back({"mixed chi=pi/6",
                     FieldSpec(parse_timefn("0.5*t^2 + t"), parse_timefn("t - 0.2*sin(3*t)"), kPi / 6)});
    return specs;
}

// Loop instants at tau = 2 pi for the phase criteria.
std::vector<NamedSpec> loop_corpus() {
    std::vector<NamedSpec> specs;
    specs.push_back({"fresnel", fresnel_spec()});
    specs.push_back({"relaxed 2/1", FieldSpec(TimeFn::linear(2.0), TimeFn::linear(1.0), kPi / 6)});
    specs.push_back({"strong 3/1", FieldSpec(TimeFn::linear(3.0), TimeFn::linear(1.0), kPi / 4)});
    specs.push_back({"sinusoid 1/2",
                     FieldSpec(parse_timefn("t + sin(t)"), parse_timefn("2*t - sin(t)"), kPi / 4)});
    specs.push_back({"quadratic 3/1",
                     FieldSpec(parse_timefn("3/(2*pi)*t^2"), TimeFn::linear(1.0), kPi / 4)});
    specs.push_back({"quad-beta 2/1",
                     FieldSpec(TimeFn::linear(2.0), parse_timefn("1/(2*pi)*t^2"), kChiFresnel)});
    return specs;
}

// theta0 range whose trajectories stay clear of the south-pole gauge guard:
// the polar angle along the trajectory peaks at max(theta0, 2 chi - theta0).
double safe_theta0(std::mt19937& rng, double chi) {
    const double lo = std::max(0.2, 2.0 * chi - kPi + 0.2);
    std::uniform_real_distribution<double> dist(lo, kPi - 0.2);
    return dist(rng);
}

void criterion_1_fresnel_integral() {
    const TimeFn alpha = fresnel_alpha();
    const double integral =
        quad([&alpha](double t) { return std::cos(alpha(t)); }, 0.0, 2.0 * kPi, 1e-10);
    const double dev = std::abs(integral - 0.700896);
    report(1, "fresnel integral = 0.700896", dev <= 1e-5, dev, 1e-5);
}

void criterion_2_fresnel_loop() {
    const LoopReport loop = check_loop(fresnel_spec(), 2.0 * kPi);
    const bool ok = loop.ell == 5 && loop.m == 1 && loop.is_loop && loop.is_strong;
    report(2, "fresnel loop (ell=5, m=1, strong)", ok,
           std::max(loop.residual_alpha, loop.residual_beta), kDefaultLoopTol);
}

void criterion_3_propagator_agreement() {
    double worst = 0.0;
    for (const NamedSpec& item : propagator_corpus()) {
        auto field = [&item](double t) { return field_at(item.spec, t); };
        const Trajectory<Spinor> plus =
            integrate_schrodinger(field, Spinor{1.0, 0.0}, 2.0 * kPi, 20000);
        const Trajectory<Spinor> minus =
            integrate_schrodinger(field, Spinor{0.0, 1.0}, 2.0 * kPi, 20000);
        for (std::size_t i = 0; i < plus.size(); ++i) {
            const Mat2c u = propagator(item.spec, plus.times[i]).U;
            Mat2c u_num;
            u_num(0, 0) = plus.states[i].c_plus;
            u_num(1, 0) = plus.states[i].c_minus;
            u_num(0, 1) = minus.states[i].c_plus;
            u_num(1, 1) = minus.states[i].c_minus;
            worst = std::max(worst, max_abs(u - u_num));
        }
    }
    report(3, "analytic vs integrated propagator", worst <= 1e-7, worst, 1e-7);
}

void criterion_4_rabi_identity() {
    std::mt19937 rng(20240811u);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    std::uniform_real_distribution<double> chi_dist(0.0, kPi);
    std::uniform_real_distribution<double> ts(0.0, 8.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const TimeFn alpha{{PolyTerm{coeff(rng), 1}, PolyTerm{0.5 * coeff(rng), 2},
                            SinTerm{0.5 * coeff(rng), 1.5, 0.0}}};
        const TimeFn beta{{PolyTerm{coeff(rng), 1}, SinTerm{0.5 * coeff(rng), 0.8, 0.0}}};
        const FieldSpec spec(alpha, beta, chi_dist(rng));
        const double t = ts(rng);
        const Spinor evolved = evolve(spec, Spinor{1.0, 0.0}, t);
        worst = std::max(worst,
                         std::abs(transition_probability(spec, t) - std::norm(evolved.c_minus)));
    }
    report(4, "Rabi identity, 100 random (spec, t)", worst <= 1e-10, worst, 1e-10);
}

void criterion_5_phase_oracle_equivalence() {
    std::mt19937 rng(20240812u);
    double worst = 0.0;
    for (const NamedSpec& item : loop_corpus()) {
        for (int i = 0; i < 10; ++i) {
            const double theta0 = safe_theta0(rng, item.spec.chi());
            const PhaseResult closed = geometric_phase_closed(item.spec, theta0, 2.0 * kPi);
            const PhaseResult numeric =
                geometric_phase_numeric(item.spec, theta0, 0.0, 2.0 * kPi, 20000);
            worst = std::max(worst, angle_distance(closed.gamma, numeric.gamma));
        }
    }
    report(5, "closed vs numeric phase (loop corpus)", worst <= 1e-4, worst, 1e-4);
}

void criterion_6_eigenpath_phases() {
    double worst = 0.0;
    bool parity_ok = true;
    for (double chi : {kPi / 6, kChiFresnel, kPi / 2}) {
        for (long n : {0L, 1L, 2L, 3L}) {
            const FieldSpec spec(TimeFn::linear(1.0), TimeFn::linear(static_cast<double>(n)), chi);
            const PhaseResult plus = geometric_phase_numeric(spec, chi, 0.0, 2.0 * kPi, 20000);
            worst = std::max(worst, std::abs(plus.gamma + n * kPi * (1.0 - std::cos(chi))));
            const PhaseResult closed_plus = geometric_phase_eigenpath(chi, n, EigenpathSign::Plus);
            worst = std::max(worst, std::abs(plus.gamma - closed_plus.gamma));

            // the 'minus' eigenpath stays clear of the south pole except at chi -> 0
            const PhaseResult minus =
                geometric_phase_numeric(spec, kPi - chi, kPi, 2.0 * kPi, 20000);
            worst = std::max(worst, std::abs(minus.gamma + n * kPi * (1.0 + std::cos(chi))));

            if (chi == kPi / 2) {
                // gamma = -n pi: zero mod 2 pi for even n, pi for odd n. The
                // closed form must sit on an exact multiple of pi of the right
                // parity (up to roundoff in pi itself).
                const long k = std::lround(closed_plus.gamma / kPi);
                parity_ok = parity_ok && std::abs(closed_plus.gamma - k * kPi) <= 1e-12 &&
                            (k % 2 + 2) % 2 == (n % 2 + 2) % 2;
                const double target = (n % 2 == 0) ? 0.0 : kPi;
                parity_ok = parity_ok && angle_distance(plus.gamma, target) <= 1e-6;
            }
        }
    }
    report(6, "eigenpath phases -n pi (1 -+ cos chi)", worst <= 1e-6 && parity_ok, worst, 1e-6);
}

void criterion_7_fresnel_consistency_chain() {
    const PhaseResult via_b3 =
        geometric_phase_b3const(3.0, fresnel_alpha(), kChiFresnel, kChiFresnel, 2.0 * kPi);
    const PhaseResult via_eigen = geometric_phase_eigenpath(kChiFresnel, 1, EigenpathSign::Plus);
    const PhaseResult via_numeric =
        geometric_phase_numeric(fresnel_spec(), kChiFresnel, 0.0, 2.0 * kPi, 20000);
    const double d1 = std::abs(via_b3.gamma - via_eigen.gamma);
    const double d2 = std::abs(via_b3.gamma - via_numeric.gamma);
    const double d3 = std::abs(via_eigen.gamma - via_numeric.gamma);
    const double worst = std::max({d1, d2, d3});
    const double ref = std::abs(via_numeric.gamma + kPi / 5.0);
    report(7, "gamma = -pi/5 by three routes", worst <= 1e-5 && ref <= 1e-5,
           std::max(worst, ref), 1e-5);
}

void criterion_8_loop_parity() {
    std::vector<FieldSpec> relaxed;
    relaxed.emplace_back(TimeFn::linear(2.0), TimeFn::linear(1.0), kPi / 6);
    relaxed.emplace_back(TimeFn::linear(1.0), TimeFn::linear(2.0), kPi / 4);
    relaxed.emplace_back(TimeFn::linear(3.0), TimeFn::linear(2.0), kChiFresnel);
    relaxed.emplace_back(parse_timefn("t + sin(t)"), parse_timefn("2*t"), kPi / 2);

    std::vector<FieldSpec> strong;
    strong.emplace_back(TimeFn::linear(3.0), TimeFn::linear(1.0), kPi / 6);
    strong.emplace_back(TimeFn::linear(2.0), TimeFn::linear(2.0), kPi / 4);
    strong.push_back(fresnel_spec());
    strong.emplace_back(parse_timefn("t - sin(t)"), parse_timefn("3*t"), kChiFresnel);

    double worst = 0.0;
    for (const FieldSpec& spec : relaxed) {
        const LoopReport loop = check_loop(spec, 2.0 * kPi);
        if (!loop.is_loop || (loop.ell + loop.m) % 2 == 0) worst = 1.0;
        worst = std::max(worst,
                         max_abs(propagator(spec, 2.0 * kPi).U + Mat2c::identity()));
    }
    for (const FieldSpec& spec : strong) {
        const LoopReport loop = check_loop(spec, 2.0 * kPi);
        if (!loop.is_loop || (loop.ell + loop.m) % 2 != 0) worst = 1.0;
        worst = std::max(worst,
                         max_abs(propagator(spec, 2.0 * kPi).U - Mat2c::identity()));
    }
    report(8, "loop parity U(tau) = (-1)^(ell+m) I", worst <= 1e-9, worst, 1e-9);
}

void criterion_9_initial_condition_independence() {
    const FieldSpec spec(parse_timefn("t^2"), parse_timefn("0.5*t"), kPi / 4);
    auto field = [&spec](double t) { return field_at(spec, t); };
    std::mt19937 rng(20240813u);
    std::uniform_real_distribution<double> theta(0.0, kPi);
    std::uniform_real_distribution<double> phi(0.0, 2.0 * kPi);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const BlochVector n0 = bloch_from_angles(theta(rng), phi(rng));
        const Trajectory<BlochVector> traj = integrate_bloch(field, n0, 2.0 * kPi, 20000);
        for (int k = 1; k <= 50; ++k) {
            const std::size_t i = static_cast<std::size_t>(k) * (traj.size() - 1) / 50;
            const Vec3 expected = rotation_at(spec, traj.times[i]) * n0.vec();
            worst = std::max(worst, norm(traj.states[i].vec() - expected));
        }
    }
    report(9, "initial-condition independence", worst <= 1e-7, worst, 1e-7);
}

void criterion_10_inverse_round_trip() {
    const FieldSpec spec(parse_timefn("t^2"), parse_timefn("0.5*t"), kPi / 4);
    auto field = [&spec](double t) { return field_at(spec, t); };
    std::mt19937 rng(20240814u);
    std::uniform_real_distribution<double> theta(0.0, kPi);
    std::uniform_real_distribution<double> phi(0.0, 2.0 * kPi);
    double worst = 0.0;
    int used = 0;
    for (int rep = 0; rep < 5; ++rep) {
        const BlochVector n0 = bloch_from_angles(theta(rng), phi(rng));
        const Trajectory<BlochVector> traj = integrate_bloch(field, n0, 2.0 * kPi, 20000);
        for (int k = 0; k <= 50; ++k) {
            const std::size_t i = static_cast<std::size_t>(k) * (traj.size() - 1) / 50;
            const BlochVector& n = traj.states[i];
            if (std::abs(n.n3) < 1e-3) continue;
            const FieldSample b = field_at(spec, traj.times[i]);
            const Vec3 n_dot = -1.0 * cross(b.vec(), n.vec());
            const FieldSample rec = inverse_field(n, n_dot, b.b3);
            worst = std::max({worst, std::abs(rec.b1 - b.b1), std::abs(rec.b2 - b.b2)});
            ++used;
        }
    }
    const bool ok = worst <= 1e-6 && used >= 200;
    report(10, "inverse-method round trip", ok, worst, 1e-6);
}

void property_suites() {
    // unitarity + norm conservation + Schrodinger residuals + derivative FD,
    // all under fixed seeds
    std::mt19937 rng(20240815u);
    std::uniform_real_distribution<double> ts(0.0, 2.0 * kPi);
    double worst_unitarity = 0.0;
    double worst_residual = 0.0;
    for (const NamedSpec& item : propagator_corpus()) {
        for (int i = 0; i < 20; ++i) {
            const double t = ts(rng);
            worst_unitarity = std::max(worst_unitarity, unitarity_defect(propagator(item.spec, t).U));
            const double h = 1e-5;
            const Mat2c diff =
                (1.0 / (2.0 * h)) * (propagator(item.spec, t + h).U - propagator(item.spec, t - h).U);
            worst_residual = std::max(
                worst_residual,
                max_abs(kImag * diff - hamiltonian(item.spec, t) * propagator(item.spec, t).U));
        }
    }
    report(11, "property: unitarity of U(t)", worst_unitarity <= 1e-10, worst_unitarity, 1e-10);
    report(12, "property: Schrodinger residual (FD)", worst_residual <= 1e-6, worst_residual, 1e-6);

    const FieldSpec drift_spec(parse_timefn("0.75*t^2"), parse_timefn("2*t"), kPi / 4);
    auto field = [&drift_spec](double t) { return field_at(drift_spec, t); };
    const Trajectory<Spinor> traj =
        integrate_schrodinger(field, spinor_from_angles(1.0, 0.3), 2.0 * kPi, 10000);
    report(13, "property: norm conservation", traj.max_renorm_drift <= 1e-10,
           traj.max_renorm_drift, 1e-10);

    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    std::uniform_real_distribution<double> sample(-3.0, 3.0);
    double worst_fd = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const TimeFn f{{PolyTerm{coeff(rng), 2}, SinTerm{coeff(rng), 1.7, 0.4},
                        CosTerm{coeff(rng), 0.9, -0.2}}};
        const TimeFn df = f.derivative();
        for (int i = 0; i < 10; ++i) {
            const double t = sample(rng);
            const double fd = (f(t + 1e-5) - f(t - 1e-5)) / 2e-5;
            worst_fd = std::max(worst_fd,
                                std::abs(df(t) - fd) / (1.0 + std::abs(df(t))));
        }
    }
    report(14, "property: TimeFn derivative vs FD", worst_fd <= 1e-5, worst_fd, 1e-5);
}

}  // namespace

int main() {
    criterion_1_fresnel_integral();
    criterion_2_fresnel_loop();
    criterion_3_propagator_agreement();
    criterion_4_rabi_identity();
    criterion_5_phase_oracle_equivalence();
    criterion_6_eigenpath_phases();
    criterion_7_fresnel_consistency_chain();
    criterion_8_loop_parity();
    criterion_9_initial_condition_independence();
    criterion_10_inverse_round_trip();
    property_suites();
    if (g_failures == 0)
        std::printf("all acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
