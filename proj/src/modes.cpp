#include "springstring/modes.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "springstring/model.hpp"
#include "springstring/scattering.hpp"
#include "springstring/spectral.hpp"

namespace springstring {

namespace {

constexpr Complex kI{0.0, 1.0};
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * kPi);
const double kInvSqrtPi = 1.0 / std::sqrt(kPi);

Complex phase(double omega, double t) { return std::exp(Complex{0.0, -omega * t}); }

// In-mode incident from the left, evaluated at (x, t).
ModeSample in_right(const ScatteringCoefficients& c, double x, double t)
{
    const double k = c.k.real();
    const Complex e = phase(c.omega, t);
    ModeSample s;
    if (x < 0.0)
        s.xi = (std::exp(kI * (k * x)) + c.rho * std::exp(-kI * (k * x))) * kInvSqrt2Pi * e;
    else
        s.xi = c.tau * std::exp(kI * (k * x)) * kInvSqrt2Pi * e;
    s.x_osc = c.chi * e;
    return s;
}

ModeSample conj_sample(const ModeSample& s) { return {std::conj(s.xi), std::conj(s.x_osc)}; }

BoundMode require_bound(const ModelParams& p)
{
    const auto b = bound_mode(p);
    if (!b)
        throw InvalidArgument("no bound mode: requires omega0 > Omega0 and kappa > 0");
    return *b;
}

} // namespace

ModeSample eval_mode(const ModeSpec& spec, double x, double t, const ModelParams& p)
{
    validate(p);
    if (!std::isfinite(x) || !std::isfinite(t))
        throw InvalidArgument("eval_mode: x and t must be finite");

    if (spec.kind == ModeKind::Bound) {
        const BoundMode b = require_bound(p);
        const Complex e = phase(b.omega_b, t);
        return {b.c_b * std::exp(-std::abs(x) / b.decay_length) * e, b.x_amplitude * e};
    }

    if (!std::isfinite(spec.k) || !(spec.k > 0.0))
        throw InvalidArgument("eval_mode: travelling modes need a real wavenumber k > 0");
    const double k = spec.k;
    const double omega = dispersion_omega(k, p);

    switch (spec.kind) {
    case ModeKind::FreeRight:
        return {std::exp(kI * (k * x)) * kInvSqrt2Pi * phase(omega, t), 0.0};
    case ModeKind::FreeLeft:
        return {std::exp(-kI * (k * x)) * kInvSqrt2Pi * phase(omega, t), 0.0};
    case ModeKind::SymOdd:
        return {std::sin(k * x) * kInvSqrtPi * phase(omega, t), 0.0};
    default:
        break;
    }

    const ScatteringCoefficients c = coefficients(omega, p);
    switch (spec.kind) {
    case ModeKind::InRight:
        return in_right(c, x, t);
    case ModeKind::InLeft:
        return in_right(c, -x, t);
    case ModeKind::OutRight:
        return conj_sample(in_right(c, -x, -t));
    case ModeKind::OutLeft:
        return conj_sample(in_right(c, x, -t));
    case ModeKind::SymEven: {
        const double eta = *c.eta;
        const Complex e = phase(omega, t);
        const double detune = -(omega - shifted_frequency(p)) * (omega + shifted_frequency(p));
        return {std::cos(k * std::abs(x) - eta) * kInvSqrtPi * e,
                p.kappa * kInvSqrtPi * std::cos(eta) / detune * e};
    }
    default:
        break;
    }
    throw InvalidArgument("eval_mode: unknown mode kind");
}

Matrix2 r_matrix(double omega, const ModelParams& p)
{
    if (!(omega > p.mass_gap))
        throw InvalidArgument("r_matrix: requires omega > omega0");
    const auto c = coefficients(omega, p);
    const Complex e = std::exp(kI * *c.eta);
    const double s = 1.0 / std::sqrt(2.0);
    return {{s * e, s * e, -kI * s, kI * s}};
}

double IdentityResiduals::max() const
{
    return std::max({one_plus_rho_minus_tau, unitarity, rho_real_part, tau_conjugate, rho_conjugate});
}

IdentityResiduals check_coefficient_identities(double omega, const ModelParams& p)
{
    if (!(omega > p.mass_gap))
        throw InvalidArgument("check_coefficient_identities: requires omega > omega0");
    const auto c = coefficients(omega, p);
    const Complex rho = c.rho;
    const Complex tau = c.tau;
    IdentityResiduals r;
    r.one_plus_rho_minus_tau = std::abs(1.0 + rho - tau);
    r.unitarity = std::abs(std::norm(rho) + std::norm(tau) - 1.0);
    r.rho_real_part = std::abs(rho + std::conj(rho) + 2.0 * std::norm(rho));
    r.tau_conjugate = std::abs(std::conj(tau) - tau / (rho + tau));
    r.rho_conjugate = std::abs(std::conj(rho) + rho / (rho + tau));
    return r;
}

double check_pv_identity(double k1, double k2, const ModelParams& p)
{
    validate(p);
    if (!(k1 > 0.0) || !(k2 > 0.0) || !std::isfinite(k1) || !std::isfinite(k2))
        throw InvalidArgument("check_pv_identity: wavenumbers must be finite and > 0");
    if (k1 == k2)
        throw InvalidArgument("check_pv_identity: coincident wavenumbers");
    const auto c1 = coefficients(dispersion_omega(k1, p), p);
    const auto c2 = coefficients(dispersion_omega(k2, p), p);
    const Complex r1 = std::conj(c1.rho);
    const Complex r2 = c2.rho;
    const Complex lhs = kI / (2.0 * kPi) * ((r2 - r1) / (k2 + k1) + (r1 + r2 + 2.0 * r1 * r2) / (k2 - k1));
    return std::abs(lhs + std::conj(c1.chi) * c2.chi);
}

double bound_mode_norm(const ModelParams& p) { return bound_mode_norm(p, require_bound(p).c_b); }

double bound_mode_norm(const ModelParams& p, double c_b)
{
    const BoundMode b = require_bound(p);
    const double alpha = 1.0 / b.decay_length;
    const double Wk = shifted_frequency(p);
    const double x_amp = p.kappa * c_b / ((Wk - b.omega_b) * (Wk + b.omega_b));
    return x_amp * x_amp + c_b * c_b / alpha;
}

Complex windowed_inner_product(const ModeSpec& a, const ModeSpec& b, double half_width, const ModelParams& p)
{
    validate(p);
    if (!std::isfinite(half_width) || !(half_width > 0.0))
        throw InvalidArgument("windowed_inner_product: half width must be finite and > 0");

    // finest length scale: a wavelength 2π/k, or the decay length of the bound mode
    double scale = half_width;
    for (const ModeSpec* s : {&a, &b}) {
        if (s->kind == ModeKind::Bound)
            scale = std::min(scale, require_bound(p).decay_length);
        else if (s->k > 0.0)
            scale = std::min(scale, 2.0 * kPi / s->k);
    }
    // 40 points per scale is the floor; 160 keeps Simpson's h⁴ error near 1e−12
    std::size_t n = static_cast<std::size_t>(std::ceil(160.0 * half_width / scale));
    n = std::max<std::size_t>(n, 64);
    n += n % 2;

    const ModeSample a0 = eval_mode(a, 0.0, 0.0, p);
    const ModeSample b0 = eval_mode(b, 0.0, 0.0, p);
    Complex total = std::conj(a0.x_osc) * b0.x_osc;

    // each half-line separately: the modes have a kink at the origin but are
    // continuous there, so x = 0 can be sampled from either side
    const double h = half_width / static_cast<double>(n);
    for (double side : {-1.0, 1.0}) {
        Complex acc{0.0};
        for (std::size_t i = 0; i <= n; ++i) {
            const double x = side * h * static_cast<double>(i);
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            const Complex fa = eval_mode(a, x, 0.0, p).xi;
            const Complex fb = eval_mode(b, x, 0.0, p).xi;
            acc += w * std::conj(fa) * fb;
        }
        total += acc * h / 3.0;
    }
    return total;
}

} // namespace springstring
