#pragma once

#include "springstring/field.hpp"
#include "springstring/types.hpp"

namespace springstring {

/// Ωκ = √(Ω₀² + κ).
double shifted_frequency(const ModelParams& p);

/// k(ω) = √(ω² − ω₀²). Real and non-negative above the gap; below it the
/// branch with Im k > 0 is taken so evanescent tails decay away from x = 0.
Complex dispersion_k(double omega, const ModelParams& p);

/// ω(k) = √(ω₀² + k²), even in k.
double dispersion_omega(double k, const ModelParams& p);

/// Period-averaged energy current ±kω|a|²/2 of a travelling wave a·e^{i(±kx−ωt)};
/// zero for ω ≤ ω₀. `direction` must be +1 or −1.
double mean_energy_current(Complex amplitude, double omega, int direction, const ModelParams& p);

/// ½P² + ½Ω₀²X² + ½κ(X − ξ₀)², with ξ₀ the central node.
double oscillator_energy(const FieldState& state, const ModelParams& p);

/// Discrete Hamiltonian of the coupled system on a uniform grid of spacing dx.
///
/// Kinetic and mass-gap terms use trapezoidal weights; the gradient term uses
/// differences centred on the half-nodes, (ξ_{i+1} − ξ_i)/dx, which makes this
/// the exact generator of the three-point stencil integrated by timedomain.
double total_energy(const FieldState& state, double dx, const ModelParams& p);

/// Energy of the string alone (no oscillator or coupling-spring terms), split at
/// the central node: nodes and bonds left of x = 0 go to `left`, those right of
/// it to `right`, and the central node's own terms are shared half-and-half.
struct EnergySplit {
    double left = 0.0;
    double right = 0.0;
};
EnergySplit string_energy_split(const FieldState& state, double dx, const ModelParams& p);

} // namespace springstring
