#pragma once

#include <array>
#include <optional>

#include "springstring/types.hpp"

namespace springstring {

/// Roots of a·z³ + b·z² + c·z + d, ordered by real part then imaginary part.
///
/// Cardano's formula followed by two Newton steps per root. Throws
/// InvalidArgument when a = 0.
std::array<Complex, 3> solve_cubic(const std::array<Complex, 4>& coeffs);

/// Real-coefficient overload: real roots come back with an exactly zero
/// imaginary part and complex roots as exact conjugate pairs.
std::array<Complex, 3> solve_cubic(const std::array<double, 4>& coeffs);

/// |p(z)| for the cubic with the given coefficients.
double cubic_residual(const std::array<Complex, 4>& coeffs, Complex z);

enum class PoleKind { DAlembert, KleinGordon };

/// Characteristic roots of the radiating oscillator.
///
/// d'Alembert: `roots` = {z₀, z₊, z₋} of z³ + ½κz² + Ωκ²z + ½κΩ₀² = 0, with
/// X ∝ e^{zt}. Klein-Gordon: `roots` = {Z₀, Z₊, Z₋} of
/// (Z + ω₀²)(Z + Ωκ²)² − ¼κ²(Z + Ω₀²)² = 0, Z = −ω². In both cases Z₊/z₊ is the
/// member of the complex pair continuing the oscillator's own pole (Im z₊ > 0,
/// Im Z₊ < 0) and the third root is labelled 0.
///
/// `frequencies[i]` is the physical ω for roots[i]: ω = iz, or ±i√Z with
/// Im ω ≤ 0 (ties broken toward Re ω ≥ 0). `physical[i]` tells whether that ω
/// zeroes the pole bracket on the sheet reached from ω > ω₀; roots created by
/// squaring the bracket into a cubic fail this test and do not count towards
/// Γ = −2·max Im ω over the physical roots.
struct PoleSet {
    PoleKind kind = PoleKind::DAlembert;
    std::array<Complex, 3> roots;
    std::array<Complex, 3> frequencies;
    std::array<bool, 3> physical{};
    double gamma = 0.0;
    bool uncoupled = false; // κ = 0: free roots returned as-is
};

PoleSet dalembert_poles(const ModelParams& p);
PoleSet kg_poles(const ModelParams& p);

/// Wavenumber used to test a complex frequency against the pole bracket:
/// the continuation from ω > ω₀ off the real axis, and the decaying branch
/// Im k > 0 for real |ω| < ω₀.
Complex pole_wavenumber(Complex omega, const ModelParams& p);

struct PoleResidual {
    double bracket = 0.0;       // |κ(ω² − Ω₀²) − 2ik(ω² − Ωκ²)|
    double scale = 0.0;         // sum of the moduli of its terms
    double inverse_tau = 0.0;   // |1/τ(ω)| under the same continuation
    double relative() const { return scale > 0.0 ? bracket / scale : bracket; }
};

PoleResidual poles_match_scattering(const ModelParams& p, Complex omega);

/// Localized non-radiating mode, present iff ω₀ > Ω₀ and κ > 0.
struct BoundMode {
    double omega_b = 0.0;
    double u_b = 0.0;          // positive root of 2u(u² + Υ + 1) + √κ(u² + Υ) = 0
    double upsilon = 0.0;      // Υ = (Ω₀² − ω₀²)/κ
    double decay_length = 0.0; // 1/√(ω₀² − ω_b²)
    double c_b = 0.0;          // string amplitude, unit-norm choice
    double x_amplitude = 0.0;  // κ·C_b/(Ωκ² − ω_b²)
};

std::optional<BoundMode> bound_mode(const ModelParams& p);

/// 2u³ + √κu² + 2(Υ + 1)u + √κΥ.
double u_cubic(double u, const ModelParams& p);

/// Right-hand side of the reduced oscillator equation on a d'Alembert string,
/// Ẍ + Ω₀²X = −(2Ωκ²/κ)Ẋ − (2/κ)X⃛. Requires ω₀ = 0 and κ > 0.
Complex abraham_lorentz_rhs(Complex x, Complex x_dot, Complex x_dddot, const ModelParams& p);

/// Ẍ + Ω₀²X minus the right-hand side above, for X = e^{zt} at t = 0.
Complex abraham_lorentz_residual(Complex z, const ModelParams& p);

/// 2ξ̇₀ + κξ₀ − κX: the attachment-point relation for outgoing radiation.
Complex attachment_residual(Complex xi0, Complex xi0_dot, Complex x, const ModelParams& p);

/// Small-κ expansions of the characteristic roots.
struct PerturbativePoles {
    Complex root0;     // z₀ or Z₀
    Complex root_plus; // z₊ or Z₊
    double gamma = 0.0;
};

PerturbativePoles perturbative_dalembert(const ModelParams& p);
/// Needs ω₀ < Ω₀.
PerturbativePoles perturbative_kg(const ModelParams& p);
/// Needs ω₀ > Ω₀.
double perturbative_bound_frequency(const ModelParams& p);

} // namespace springstring
