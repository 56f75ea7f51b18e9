#pragma once

#include <array>

#include "springstring/matrix2.hpp"
#include "springstring/types.hpp"

namespace springstring {

enum class ModeKind { FreeRight, FreeLeft, InRight, InLeft, OutRight, OutLeft, SymEven, SymOdd, Bound };

/// A stationary mode of the coupled system. `k` is the (positive) wavenumber of
/// every kind except Bound, which ignores it.
struct ModeSpec {
    ModeKind kind = ModeKind::InRight;
    double k = 1.0;
};

/// One state Ξ = (ξ(x, t), X(t)).
struct ModeSample {
    Complex xi;
    Complex x_osc;
};

/// Evaluates the mode at (x, t). Directional modes carry 1/√(2π), the
/// parity-symmetric ones 1/√π, and the bound mode its unit-norm amplitude C_b.
///
///   InRight:  x < 0: (e^{ikx} + ρe^{−ikx})/√(2π),  x ≥ 0: τe^{ikx}/√(2π),  X = χ
///   InLeft:   InRight mirrored, x ↦ −x
///   OutRight: conj(InLeft(x, −t)), so X = χ*;  OutLeft likewise from InRight
///   SymEven:  cos(k|x| − η)/√π,  X = κcos η/(√π(Ωκ² − ω²))
///   SymOdd:   sin(kx)/√π,  X = 0
///   Free*:    e^{±ikx}/√(2π),  X = 0
/// all times e^{−iωt}.
ModeSample eval_mode(const ModeSpec& spec, double x, double t, const ModelParams& p);

/// (1/√2)[[e^{iη}, e^{iη}], [−i, i]]: maps (InRight, InLeft) onto (SymEven, SymOdd).
Matrix2 r_matrix(double omega, const ModelParams& p);

/// Residuals of the algebraic relations between ρ and τ at one frequency.
struct IdentityResiduals {
    double one_plus_rho_minus_tau = 0.0; // |1 + ρ − τ|
    double unitarity = 0.0;              // ||ρ|² + |τ|² − 1|
    double rho_real_part = 0.0;          // |ρ + ρ* + 2|ρ|²|
    double tau_conjugate = 0.0;          // |τ* − τ/(ρ + τ)|
    double rho_conjugate = 0.0;          // |ρ* + ρ/(ρ + τ)|
    double max() const;
};

IdentityResiduals check_coefficient_identities(double omega, const ModelParams& p);

/// |(i/2π)[(ρ₂ − ρ₁*)/(k₂ + k₁) + (ρ₁* + ρ₂ + 2ρ₁*ρ₂)/(k₂ − k₁)] + χ*(ω₁)χ(ω₂)|,
/// the relation that closes the orthonormality of the in-modes.
double check_pv_identity(double k1, double k2, const ModelParams& p);

/// |X_b|² + ∫|ξ_b|²dx evaluated in closed form, with the unit-norm C_b or with
/// the supplied string amplitude. Throws InvalidArgument when no bound mode exists.
double bound_mode_norm(const ModelParams& p);
double bound_mode_norm(const ModelParams& p, double c_b);

/// X₁*X₂ + ∫_{−L}^{L} ξ₁*ξ₂ dx at t = 0, composite Simpson on each half-line
/// with at least 40 points per shortest wavelength (or decay length).
Complex windowed_inner_product(const ModeSpec& a, const ModeSpec& b, double half_width, const ModelParams& p);

} // namespace springstring
