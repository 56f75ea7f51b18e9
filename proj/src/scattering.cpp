#include "springstring/scattering.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "springstring/csv.hpp"
#include "springstring/model.hpp"

namespace springstring {

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * kPi);
constexpr Complex kI{0.0, 1.0};

bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// ω² − W², factored to keep relative precision when ω ≈ W.
double diff_sq(double omega, double w) { return (omega - w) * (omega + w); }

void check_omega(double omega, const ModelParams& p)
{
    validate(p);
    if (!std::isfinite(omega) || omega <= 0.0)
        throw InvalidArgument("omega must be finite and > 0");
    if (omega == p.mass_gap)
        throw BranchPointError("omega equals the mass gap omega0 (branch point of k)");
    if (omega == shifted_frequency(p))
        throw PoleError("omega equals Omega_kappa (pole of the scattering phase)");
}

void require_propagating(double omega, const ModelParams& p, const char* what)
{
    if (!(omega > p.mass_gap))
        throw InvalidArgument(std::string(what) + ": requires omega > omega0");
}

} // namespace

ScatteringCoefficients coefficients(double omega, const ModelParams& p)
{
    check_omega(omega, p);
    const double Wk = shifted_frequency(p);
    const double num = diff_sq(omega, p.bare_frequency); // ω² − Ω₀²
    const double den = diff_sq(omega, Wk);               // ω² − Ωκ²

    ScatteringCoefficients c;
    c.omega = omega;
    c.k = dispersion_k(omega, p);
    const Complex k = c.k;

    // iκ(ω² − Ω₀²)/(2k): shared by the χ denominator and the rational forms
    const Complex damping = kI * p.kappa * num / (2.0 * k);
    c.chi = p.kappa * kInvSqrt2Pi / (-den - damping);

    if (omega > p.mass_gap) {
        const double tan_eta = p.kappa * num / (2.0 * k.real() * den);
        const double eta = std::atan(tan_eta);
        const Complex e = std::exp(Complex{0.0, -2.0 * eta});
        c.eta = eta;
        c.tau = 0.5 + 0.5 * e;
        c.rho = -0.5 + 0.5 * e;

        const Complex tau_r = 1.0 / (1.0 + kI * tan_eta);
        const Complex rho_r = -kI * tan_eta / (1.0 + kI * tan_eta);
        const double mismatch = std::abs(c.tau - tau_r) + std::abs(c.rho - rho_r);
        if (!(mismatch <= 1e-10))
            throw NumericalError("coefficients: phase and rational forms disagree");
    } else {
        // k = i q: the argument of arctan becomes −iκr/(2q), so ρ and τ are real.
        const Complex arg = p.kappa * num / (2.0 * k * den);
        c.tau = 1.0 / (1.0 + kI * arg);
        c.rho = -kI * arg / (1.0 + kI * arg);
    }

    if (!is_finite(c.tau) || !is_finite(c.rho) || !is_finite(c.chi))
        throw PoleError("coefficients: closed forms are singular at this frequency");
    return c;
}

DirectSolution solve_scattering_direct(double omega, const ModelParams& p)
{
    validate(p);
    if (!std::isfinite(omega))
        throw InvalidArgument("omega must be finite");
    require_propagating(omega, p, "solve_scattering_direct");
    const double k = dispersion_k(omega, p).real();
    const double kappa = p.kappa;
    const double detuning = -diff_sq(omega, shifted_frequency(p)); // Ωκ² − ω²

    // Unknowns (ρ, χ), incident amplitude 1/√(2π):
    //   slope jump:  (2ik − κ)ρ/√(2π) + κχ = κ/√(2π)
    //   oscillator:  −κρ/√(2π) + (Ωκ² − ω²)χ = κ/√(2π)
    const Complex a11 = (Complex{-kappa, 2.0 * k}) * kInvSqrt2Pi;
    const Complex a12 = kappa;
    const Complex a21 = -kappa * kInvSqrt2Pi;
    const Complex a22 = detuning;
    const Complex b1 = kappa * kInvSqrt2Pi;
    const Complex b2 = kappa * kInvSqrt2Pi;

    const Complex det = a11 * a22 - a12 * a21;
    const double scale = std::abs(a11 * a22) + std::abs(a12 * a21);
    if (std::abs(det) <= 1e-14 * scale || det == Complex{0.0})
        throw PoleError("solve_scattering_direct: singular system");

    DirectSolution s;
    s.rho = (b1 * a22 - a12 * b2) / det;
    s.chi = (a11 * b2 - b1 * a21) / det;
    s.tau = 1.0 + s.rho;
    return s;
}

Matrix2 s_matrix(double omega, const ModelParams& p)
{
    require_propagating(omega, p, "s_matrix");
    const auto c = coefficients(omega, p);
    const Complex ts = std::conj(c.tau);
    const Complex rs = std::conj(c.rho);
    return {{ts, rs, rs, ts}};
}

Matrix2 t_matrix(double omega, const ModelParams& p)
{
    require_propagating(omega, p, "t_matrix");
    const auto c = coefficients(omega, p);
    if (c.tau == Complex{0.0})
        throw PoleError("t_matrix: tau vanishes (exact resonance)");
    const Complex r = c.rho / c.tau;
    Matrix2 t{{1.0 + r, r, -r, 1.0 / c.tau}};
    if (!all_finite(t))
        throw PoleError("t_matrix: tau vanishes (exact resonance)");
    return t;
}

ReflectionTransmission from_transfer(const Matrix2& t)
{
    if (t(1, 1) == Complex{0.0})
        throw InvalidArgument("from_transfer: T22 is zero");
    return {t(0, 1) / t(1, 1), 1.0 / t(1, 1)};
}

Matrix2 compose_transfer(std::span<const Matrix2> ts)
{
    if (ts.empty())
        throw InvalidArgument("compose_transfer: empty list");
    Matrix2 acc = Matrix2::identity();
    for (const Matrix2& t : ts) {
        if (!(std::abs(t.det() - 1.0) <= 1e-10))
            throw InvalidArgument("compose_transfer: factor with det != 1");
        acc = t * acc;
    }
    return acc;
}

ResonanceQuality resonance_quality(const ModelParams& p)
{
    validate(p);
    if (p.kappa <= 0.0)
        throw BracketError("resonance_quality: no resonance without coupling");
    if (shifted_frequency(p) <= p.mass_gap)
        throw BracketError("resonance_quality: Omega_kappa lies below the mass gap, no resonance");

    const double Wk = shifted_frequency(p);
    const double target = 1.0 / std::sqrt(2.0);
    auto f = [&](double w) { return std::abs(coefficients(w, p).rho) - target; };

    auto half_power_point = [&](double sign) {
        double inner = Wk;
        double delta = 1e-13 * Wk;
        double outer = Wk + sign * delta;
        while (f(outer) > 0.0) {
            inner = outer;
            delta *= 2.0;
            outer = Wk + sign * delta;
            if (sign < 0.0 && outer <= p.mass_gap)
                throw BracketError("resonance_quality: no half-power point above omega0");
            if (delta > 1e6 * Wk)
                throw BracketError("resonance_quality: no half-power point above Omega_kappa");
        }
        // f(inner) > 0 >= f(outer)
        const double tol = 1e-12 * std::max(1.0, Wk);
        while (std::abs(outer - inner) > tol) {
            const double mid = 0.5 * (inner + outer);
            if (mid == inner || mid == outer)
                break;
            (f(mid) > 0.0 ? inner : outer) = mid;
        }
        return 0.5 * (inner + outer);
    };

    ResonanceQuality q;
    q.omega_low = half_power_point(-1.0);
    q.omega_high = half_power_point(+1.0);
    q.q_numeric = Wk / (q.omega_high - q.omega_low);
    const double W0 = p.bare_frequency;
    q.q_perturbative = p.mass_gap < W0
                           ? 2.0 * W0 * W0 * std::sqrt(diff_sq(W0, p.mass_gap)) / (p.kappa * p.kappa)
                           : std::numeric_limits<double>::quiet_NaN();
    return q;
}

std::vector<SweepRow> sweep(double omega_min, double omega_max, std::size_t n_points,
                            const ModelParams& p)
{
    validate(p);
    if (!(std::isfinite(omega_min) && std::isfinite(omega_max)) || !(omega_min > p.mass_gap)
        || !(omega_max > omega_min))
        throw InvalidArgument("sweep: need omega0 < omega_min < omega_max");
    if (n_points < 2)
        throw InvalidArgument("sweep: need at least two points");

    const double step = (omega_max - omega_min) / static_cast<double>(n_points - 1);
    const double Wk = shifted_frequency(p);
    std::vector<SweepRow> rows(n_points);
    parallel_for(n_points, [&](std::size_t i) {
        double w = (i + 1 == n_points) ? omega_max : omega_min + static_cast<double>(i) * step;
        SweepRow row;
        if (w == Wk) {
            w += 0.5 * step;
            row.shifted = true;
        }
        row.c = coefficients(w, p);
        rows[i] = row;
    });
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows)
{
    os << "omega,k,re_rho,im_rho,abs_rho,re_tau,im_tau,abs_tau,eta,re_chi,im_chi\n";
    for (const auto& row : rows) {
        const auto& c = row.c;
        write_csv_row(os, {c.omega, c.k.real(), c.rho.real(), c.rho.imag(), std::abs(c.rho),
                           c.tau.real(), c.tau.imag(), std::abs(c.tau),
                           c.eta.value_or(std::numeric_limits<double>::quiet_NaN()),
                           c.chi.real(), c.chi.imag()});
    }
}

Complex continued_wavenumber(Complex omega, const ModelParams& p)
{
    validate(p);
    if (omega == Complex{0.0})
        throw BranchPointError("continued_wavenumber: omega = 0");
    const double w0 = p.mass_gap;
    return omega * std::sqrt(1.0 - w0 * w0 / (omega * omega));
}

Complex pole_bracket(Complex omega, Complex k, const ModelParams& p)
{
    const double W0 = p.bare_frequency;
    const double Wk2 = W0 * W0 + p.kappa;
    const Complex w2 = omega * omega;
    return p.kappa * (w2 - W0 * W0) - 2.0 * kI * k * (w2 - Wk2);
}

Complex inverse_transmission(Complex omega, Complex k, const ModelParams& p)
{
    const double W0 = p.bare_frequency;
    const double Wk2 = W0 * W0 + p.kappa;
    const Complex w2 = omega * omega;
    return 1.0 + kI * p.kappa * (w2 - W0 * W0) / (2.0 * k * (w2 - Wk2));
}

} // namespace springstring
