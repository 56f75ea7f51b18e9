#pragma once

#include <iosfwd>
#include <vector>

#include "springstring/types.hpp"

namespace springstring {

/// One level of a string of length ℓ clamped at x = ±ℓ/2 with the oscillator
/// at the centre. For even levels `branch` is the n in ½kℓ − η_c = π/2 + nπ,
/// η_c being η made continuous across Ωκ (η_c = η − π above it), and
/// `residual` is |½kℓ − η − π/2| reduced modulo π. Odd levels carry
/// |sin(kℓ/2)| and free levels 0.
struct CavityLevel {
    int branch = 0;
    double k = 0.0;
    double omega = 0.0;
    double residual = 0.0;
};

struct EvenSpectrum {
    std::vector<CavityLevel> levels; // strictly increasing k
    std::vector<int> missing_branches; // targets with no sign change in range
};

/// Even (oscillator-coupled) levels for branches 0..n_max.
///
/// ½kℓ − η_c(k) is sampled on a grid fine enough to resolve the resonance and
/// every sign change against each target is refined by bisection. Several
/// crossings of one target are all kept.
EvenSpectrum even_spectrum(double length, int n_max, const ModelParams& p);

/// kₙ = 2πn/ℓ, n = 1..n_max: the antisymmetric levels never move the oscillator.
std::vector<double> odd_spectrum(double length, int n_max);

/// ωₙ = √(ω₀² + π²(2n + 1)²/ℓ²), n = 0..n_max: the even levels of the bare string.
std::vector<double> free_spectrum(double length, int n_max, const ModelParams& p);

/// Continuous scattering phase η_c(k) used by even_spectrum.
double continuous_phase(double k, const ModelParams& p);

/// Levels with lo < ω ≤ hi in a list of frequencies.
int count_levels(const std::vector<double>& omegas, double lo, double hi);
std::vector<double> level_frequencies(const EvenSpectrum& s);

/// n,branch,k,omega,residual for all three families.
void write_cavity_csv(std::ostream& os, const EvenSpectrum& even, const std::vector<double>& odd_k,
                      const std::vector<double>& free_omega, double length, const ModelParams& p);

/// omega,k,tan_eta,tan_half_kl_minus_half_pi: the two curves whose
/// intersections are the even levels, sampled at n points in (ω₀, ω_max].
void write_graphical_csv(std::ostream& os, double length, double omega_max, std::size_t n, const ModelParams& p);

} // namespace springstring
