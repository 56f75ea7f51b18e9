#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "springstring/matrix2.hpp"
#include "springstring/types.hpp"

namespace springstring {

/// Reflection, transmission and oscillator susceptibility at one real frequency.
struct ScatteringCoefficients {
    double omega = 0.0;
    Complex k;   // real above the gap, i·|k| below
    Complex rho; // reflection ρ
    Complex tau; // transmission τ = 1 + ρ
    Complex chi; // oscillator amplitude per incident wave χ(ω)
    std::optional<double> eta; // scattering phase, only defined above the gap
};

/// Closed-form ρ, τ, η, χ.
///
/// Above the gap the phase η = arctan[κ(ω²−Ω₀²)/(2k(ω²−Ωκ²))] is computed
/// first and ρ = −½ + ½e^{−2iη}, τ = ½ + ½e^{−2iη}; the rational forms are
/// evaluated alongside and any disagreement beyond 1e−10 raises
/// NumericalError. Below the gap (0 < ω < ω₀) only the continued rational
/// forms exist and `eta` is empty.
///
/// Throws BranchPointError at ω = ω₀ and PoleError at ω = Ωκ, or wherever the
/// continued forms blow up (the bound-mode frequency below the gap).
ScatteringCoefficients coefficients(double omega, const ModelParams& p);

struct DirectSolution {
    Complex rho;
    Complex tau;
    Complex chi;
};

/// Independent route: solves the 2×2 linear system in (ρ, χ) built from
/// continuity of ξ at x = 0, the slope jump ξ'(0⁺) − ξ'(0⁻) = κ(ξ₀ − X) and the
/// driven oscillator equation, for the in-mode incident from the left.
/// Requires ω > ω₀.
DirectSolution solve_scattering_direct(double omega, const ModelParams& p);

/// S(ω) = [[τ*, ρ*], [ρ*, τ*]], mapping (C₊, D₋) to (C₋, D₊). Requires ω > ω₀.
Matrix2 s_matrix(double omega, const ModelParams& p);

/// T(ω) = [[1 + ρ/τ, ρ/τ], [−ρ/τ, 1/τ]], mapping left to right plane-wave
/// amplitudes. Requires ω > ω₀; PoleError where τ = 0.
Matrix2 t_matrix(double omega, const ModelParams& p);

/// Inverse of t_matrix: τ = 1/T₂₂, ρ = T₁₂/T₂₂.
struct ReflectionTransmission {
    Complex rho;
    Complex tau;
};
ReflectionTransmission from_transfer(const Matrix2& t);

/// Product of transfer matrices for scatterers listed left to right, i.e.
/// ts.back() · … · ts.front(). Every factor must have det = 1 within 1e−10.
Matrix2 compose_transfer(std::span<const Matrix2> ts);

struct ResonanceQuality {
    double q_numeric = 0.0;
    double q_perturbative = 0.0;
    double omega_low = 0.0;  // |ρ| = 1/√2 below Ωκ
    double omega_high = 0.0; // |ρ| = 1/√2 above Ωκ
};

/// Q = Ωκ/Δω from the half-power points of |ρ|, found by geometric expansion
/// away from Ωκ followed by bisection, together with 2Ω₀²√(Ω₀²−ω₀²)/κ² (NaN
/// unless ω₀ < Ω₀). Throws BracketError when there is no resonance (κ = 0 or
/// Ωκ ≤ ω₀) or a half-power point cannot be bracketed above the gap.
ResonanceQuality resonance_quality(const ModelParams& p);

struct SweepRow {
    ScatteringCoefficients c;
    bool shifted = false; // sample landed on Ωκ and was moved by half a step
};

/// Uniform sweep over [omega_min, omega_max] with ω₀ < omega_min.
std::vector<SweepRow> sweep(double omega_min, double omega_max, std::size_t n_points,
                            const ModelParams& p);

/// Header: omega,k,re_rho,im_rho,abs_rho,re_tau,im_tau,abs_tau,eta,re_chi,im_chi
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

// Analytic continuation off the real axis.

/// k(ω) continued from ω > ω₀ into the complex plane: ω·√(1 − ω₀²/ω²), which
/// is analytic away from the cut [−ω₀, ω₀] and tends to ω for large |ω|.
Complex continued_wavenumber(Complex omega, const ModelParams& p);

/// κ(ω² − Ω₀²) − 2ik(ω² − Ωκ²); its zeros are the poles of τ and ρ.
Complex pole_bracket(Complex omega, Complex k, const ModelParams& p);

/// 1/τ = 1 + iκ(ω² − Ω₀²)/(2k(ω² − Ωκ²)) for arbitrary complex (ω, k).
Complex inverse_transmission(Complex omega, Complex k, const ModelParams& p);

} // namespace springstring
