#pragma once

#include <cstddef>
#include <variant>
#include <vector>

namespace springstring {

struct Dirichlet {};

/// Absorbing layer at both ends: ξ and π are multiplied each step by
/// exp(−strength·ramp·dt), ramp rising as sin² from 0 to 1 across `width`.
struct Sponge {
    double width = 0.0;
    double strength = 0.0;
};

using Boundary = std::variant<Dirichlet, Sponge>;

/// Uniform grid on [−ℓ/2, ℓ/2] with an odd node count so that the central
/// node sits at x = 0. End nodes are held at ξ = 0.
struct GridSpec {
    std::size_t n_nodes = 3;
    double dx = 1.0;
    double dt = 0.5;
    Boundary boundary = Dirichlet{};

    double length() const { return static_cast<double>(n_nodes - 1) * dx; }
    std::size_t center() const { return (n_nodes - 1) / 2; }
    double position(std::size_t i) const
    {
        return (static_cast<double>(i) - static_cast<double>(center())) * dx;
    }
    bool has_sponge() const { return std::holds_alternative<Sponge>(boundary); }
};

/// Throws InvalidArgument (CflError for dt > dx/2) on a malformed grid.
void validate(const GridSpec& grid);

/// Discretized string (ξ, π = ∂ξ/∂t per node) plus the oscillator (X, P_X = Ẋ).
struct FieldState {
    std::vector<double> xi;
    std::vector<double> pi;
    double x_osc = 0.0;
    double p_osc = 0.0;
    double t = 0.0;
};

FieldState zero_state(const GridSpec& grid);

} // namespace springstring
