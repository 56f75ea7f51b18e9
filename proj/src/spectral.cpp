#include "springstring/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "springstring/model.hpp"
#include "springstring/scattering.hpp"

namespace springstring {

namespace {

constexpr Complex kI{0.0, 1.0};

Complex horner(const std::array<Complex, 4>& c, Complex z)
{
    return ((c[0] * z + c[1]) * z + c[2]) * z + c[3];
}

Complex horner_derivative(const std::array<Complex, 4>& c, Complex z)
{
    return (3.0 * c[0] * z + 2.0 * c[1]) * z + c[2];
}

bool lex_less(Complex a, Complex b)
{
    if (a.real() != b.real())
        return a.real() < b.real();
    return a.imag() < b.imag();
}

void newton_polish(const std::array<Complex, 4>& c, Complex& z)
{
    for (int i = 0; i < 2; ++i) {
        const Complex d = horner_derivative(c, z);
        if (d == Complex{0.0})
            return;
        const Complex next = z - horner(c, z) / d;
        // keep the polished value only if it improves the residual
        if (std::abs(horner(c, next)) <= std::abs(horner(c, z)))
            z = next;
    }
}

} // namespace

double cubic_residual(const std::array<Complex, 4>& coeffs, Complex z) { return std::abs(horner(coeffs, z)); }

std::array<Complex, 3> solve_cubic(const std::array<Complex, 4>& coeffs)
{
    if (coeffs[0] == Complex{0.0})
        throw InvalidArgument("solve_cubic: leading coefficient is zero");
    for (const auto& v : coeffs)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw InvalidArgument("solve_cubic: non-finite coefficient");

    const Complex a = coeffs[1] / coeffs[0];
    const Complex b = coeffs[2] / coeffs[0];
    const Complex c = coeffs[3] / coeffs[0];

    // z = y − a/3 gives y³ + P·y + Q = 0
    const Complex P = b - a * a / 3.0;
    const Complex Q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const Complex disc = std::sqrt(Q * Q / 4.0 + P * P * P / 27.0);
    // pick the sign that avoids cancellation
    const Complex w1 = -Q / 2.0 + disc;
    const Complex w2 = -Q / 2.0 - disc;
    const Complex w = std::abs(w1) >= std::abs(w2) ? w1 : w2;

    std::array<Complex, 3> roots;
    const Complex shift = -a / 3.0;
    if (std::abs(w) == 0.0) {
        roots.fill(shift); // triple root
    } else {
        const Complex u = std::pow(w, 1.0 / 3.0);
        const Complex unity{-0.5, std::sqrt(3.0) / 2.0};
        Complex uj = u;
        for (auto& r : roots) {
            r = uj - P / (3.0 * uj) + shift;
            uj *= unity;
        }
    }
    for (auto& r : roots)
        newton_polish(coeffs, r);
    std::sort(roots.begin(), roots.end(), lex_less);
    return roots;
}

std::array<Complex, 3> solve_cubic(const std::array<double, 4>& coeffs)
{
    const std::array<Complex, 4> cc{coeffs[0], coeffs[1], coeffs[2], coeffs[3]};
    auto roots = solve_cubic(cc);

    // A real cubic has at least one real root: the one closest to the axis.
    std::sort(roots.begin(), roots.end(),
              [](Complex x, Complex y) { return std::abs(x.imag()) < std::abs(y.imag()); });
    auto real_polish = [&](double x) {
        for (int i = 0; i < 3; ++i) {
            const double f = ((coeffs[0] * x + coeffs[1]) * x + coeffs[2]) * x + coeffs[3];
            const double d = (3.0 * coeffs[0] * x + 2.0 * coeffs[1]) * x + coeffs[2];
            if (d == 0.0)
                break;
            const double next = x - f / d;
            const double fn = ((coeffs[0] * next + coeffs[1]) * next + coeffs[2]) * next + coeffs[3];
            if (std::abs(fn) > std::abs(f))
                break;
            x = next;
        }
        return Complex{x, 0.0};
    };
    roots[0] = real_polish(roots[0].real());

    const double size = std::abs(roots[1]) + std::abs(roots[2]) + 1.0;
    const double tol = 1e-9 * size;
    if (std::abs(roots[1].imag()) + std::abs(roots[2].imag()) <= tol) {
        roots[1] = real_polish(roots[1].real());
        roots[2] = real_polish(roots[2].real());
    } else {
        Complex up = roots[1].imag() >= 0.0 ? roots[1] : roots[2];
        Complex down = roots[1].imag() >= 0.0 ? roots[2] : roots[1];
        const Complex m = 0.5 * (up + std::conj(down));
        roots[1] = m;
        roots[2] = std::conj(m);
    }
    std::sort(roots.begin(), roots.end(), lex_less);
    return roots;
}

namespace {

// Picks {root0, root_plus, root_minus} from a sorted set: the real root (or,
// when all are real, the one closest to `anchor`) first, then the complex pair
// with Im of `plus_sign` first.
std::array<Complex, 3> label_roots(std::array<Complex, 3> r, double anchor, double plus_sign)
{
    const bool all_real = r[0].imag() == 0.0 && r[1].imag() == 0.0 && r[2].imag() == 0.0;
    std::size_t i0 = 0;
    if (all_real) {
        for (std::size_t i = 1; i < 3; ++i)
            if (std::abs(r[i].real() - anchor) < std::abs(r[i0].real() - anchor))
                i0 = i;
    } else {
        for (std::size_t i = 1; i < 3; ++i)
            if (std::abs(r[i].imag()) < std::abs(r[i0].imag()))
                i0 = i;
    }
    std::array<Complex, 2> rest;
    std::size_t j = 0;
    for (std::size_t i = 0; i < 3; ++i)
        if (i != i0)
            rest[j++] = r[i];
    if (!all_real && plus_sign * rest[0].imag() < plus_sign * rest[1].imag())
        std::swap(rest[0], rest[1]);
    if (all_real && rest[0].real() < rest[1].real())
        std::swap(rest[0], rest[1]);
    return {r[i0], rest[0], rest[1]};
}

Complex physical_frequency_from_Z(Complex Z)
{
    Complex w = kI * std::sqrt(Z);
    const double tie = 1e-14 * std::max(1.0, std::abs(w));
    if (std::abs(w.imag()) <= tie) {
        w = {w.real(), 0.0};
        if (w.real() < 0.0)
            w = -w;
    } else if (w.imag() > 0.0) {
        w = -w;
    }
    return w;
}

void classify(PoleSet& s, const ModelParams& p)
{
    double best = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t i = 0; i < 3; ++i) {
        const PoleResidual r = poles_match_scattering(p, s.frequencies[i]);
        s.physical[i] = r.relative() <= 1e-8;
        if (s.physical[i]) {
            any = true;
            best = std::max(best, s.frequencies[i].imag());
        }
    }
    if (!any)
        throw NumericalError("no characteristic root satisfies the pole condition");
    s.gamma = std::max(0.0, -2.0 * best);
}

} // namespace

PoleSet dalembert_poles(const ModelParams& p)
{
    validate(p);
    if (p.mass_gap != 0.0)
        throw InvalidArgument("dalembert_poles: requires omega0 = 0");
    const double W0 = p.bare_frequency;
    const double kappa = p.kappa;
    const double Wk = shifted_frequency(p);

    PoleSet s;
    s.kind = PoleKind::DAlembert;
    if (kappa == 0.0) {
        s.uncoupled = true;
        s.roots = {Complex{0.0}, Complex{0.0, W0}, Complex{0.0, -W0}};
    } else {
        const auto r = solve_cubic(std::array<double, 4>{1.0, 0.5 * kappa, Wk * Wk, 0.5 * kappa * W0 * W0});
        s.roots = label_roots(r, -0.5 * kappa, +1.0);
    }
    for (std::size_t i = 0; i < 3; ++i)
        s.frequencies[i] = kI * s.roots[i];
    if (s.uncoupled) {
        s.physical = {true, true, true};
        s.gamma = 0.0;
        return s;
    }
    classify(s, p);
    // every z-root is physical on a dispersionless string
    s.gamma = -2.0 * std::max(s.roots[1].real(), s.roots[2].real());
    return s;
}

PoleSet kg_poles(const ModelParams& p)
{
    validate(p);
    const double W0 = p.bare_frequency;
    const double w0 = p.mass_gap;
    const double kappa = p.kappa;
    const double Wk2 = W0 * W0 + kappa;

    const double b = 2.0 * Wk2 + w0 * w0 - kappa * kappa / 4.0;
    const double c = Wk2 * Wk2 + 2.0 * w0 * w0 * Wk2 - kappa * kappa * W0 * W0 / 2.0;
    const double d = w0 * w0 * Wk2 * Wk2 - kappa * kappa * W0 * W0 * W0 * W0 / 4.0;

    PoleSet s;
    s.kind = PoleKind::KleinGordon;
    s.uncoupled = kappa == 0.0;
    const auto r = solve_cubic(std::array<double, 4>{1.0, b, c, d});
    s.roots = label_roots(r, -w0 * w0, -1.0);
    for (std::size_t i = 0; i < 3; ++i)
        s.frequencies[i] = physical_frequency_from_Z(s.roots[i]);
    classify(s, p);
    return s;
}

Complex pole_wavenumber(Complex omega, const ModelParams& p)
{
    validate(p);
    const double w0 = p.mass_gap;
    const double tie = 1e-12 * std::max(1.0, std::abs(omega));
    if (std::abs(omega.imag()) <= tie) {
        const double w = std::abs(omega.real());
        if (w < w0)
            return {0.0, std::sqrt((w0 - w) * (w0 + w))};
        const double k = std::sqrt((w - w0) * (w + w0));
        return {omega.real() < 0.0 ? -k : k, 0.0};
    }
    return continued_wavenumber(omega, p);
}

PoleResidual poles_match_scattering(const ModelParams& p, Complex omega)
{
    validate(p);
    const Complex k = pole_wavenumber(omega, p);
    const double W0 = p.bare_frequency;
    const double Wk2 = W0 * W0 + p.kappa;
    const Complex w2 = omega * omega;

    PoleResidual r;
    r.bracket = std::abs(pole_bracket(omega, k, p));
    r.scale = p.kappa * (std::abs(w2) + W0 * W0) + 2.0 * std::abs(k) * (std::abs(w2) + Wk2);
    if (k == Complex{0.0} || w2 == Complex{Wk2})
        r.inverse_tau = std::numeric_limits<double>::infinity();
    else
        r.inverse_tau = std::abs(inverse_transmission(omega, k, p));
    return r;
}

double u_cubic(double u, const ModelParams& p)
{
    const double sk = std::sqrt(p.kappa);
    const double ups = (p.bare_frequency * p.bare_frequency - p.mass_gap * p.mass_gap) / p.kappa;
    return ((2.0 * u + sk) * u + 2.0 * (ups + 1.0)) * u + sk * ups;
}

std::optional<BoundMode> bound_mode(const ModelParams& p)
{
    validate(p);
    if (p.kappa <= 0.0 || !(p.mass_gap > p.bare_frequency))
        return std::nullopt;

    const double kappa = p.kappa;
    const double sk = std::sqrt(kappa);
    const double W0 = p.bare_frequency;
    const double w0 = p.mass_gap;
    const double ups = (W0 - w0) * (W0 + w0) / kappa;

    // f(0) = √κΥ < 0; the Cauchy bound of the monic cubic caps every root.
    double lo = 0.0;
    double hi = 1.0 + std::max({sk / 2.0, std::abs(ups + 1.0), sk * std::abs(ups) / 2.0});
    auto f = [&](double u) { return u_cubic(u, p); };
    auto df = [&](double u) { return (6.0 * u + 2.0 * sk) * u + 2.0 * (ups + 1.0); };
    if (!(f(lo) < 0.0 && f(hi) > 0.0))
        throw BracketError("bound_mode: positive root of the u-cubic not bracketed");

    double u = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double fu = f(u);
        if (fu == 0.0)
            break;
        (fu < 0.0 ? lo : hi) = u;
        const double d = df(u);
        double next = d != 0.0 ? u - fu / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (std::abs(next - u) <= 1e-16 * std::max(1.0, u)) {
            u = next;
            break;
        }
        u = next;
    }

    BoundMode m;
    m.u_b = u;
    m.upsilon = ups;
    const double gap = kappa * u * u;     // ω₀² − ω_b²
    const double detune = kappa * (u * u + ups + 1.0); // Ωκ² − ω_b²
    m.omega_b = std::sqrt(w0 * w0 - gap);
    const double alpha = sk * u;
    m.decay_length = 1.0 / alpha;
    m.c_b = 1.0 / std::sqrt(1.0 / alpha + kappa * kappa / (detune * detune));
    m.x_amplitude = kappa * m.c_b / detune;
    return m;
}

Complex abraham_lorentz_rhs(Complex x, Complex x_dot, Complex x_dddot, const ModelParams& p)
{
    validate(p);
    (void)x;
    if (p.mass_gap != 0.0)
        throw InvalidArgument("abraham_lorentz_rhs: requires omega0 = 0");
    if (p.kappa <= 0.0)
        throw InvalidArgument("abraham_lorentz_rhs: requires kappa > 0");
    const double Wk2 = p.bare_frequency * p.bare_frequency + p.kappa;
    return -(2.0 * Wk2 / p.kappa) * x_dot - (2.0 / p.kappa) * x_dddot;
}

Complex abraham_lorentz_residual(Complex z, const ModelParams& p)
{
    const double W0 = p.bare_frequency;
    return z * z + W0 * W0 - abraham_lorentz_rhs(1.0, z, z * z * z, p);
}

Complex attachment_residual(Complex xi0, Complex xi0_dot, Complex x, const ModelParams& p)
{
    validate(p);
    return 2.0 * xi0_dot + p.kappa * xi0 - p.kappa * x;
}

PerturbativePoles perturbative_dalembert(const ModelParams& p)
{
    validate(p);
    const double k = p.kappa;
    const double W = p.bare_frequency;
    PerturbativePoles r;
    r.root0 = -k / 2.0 + k * k / (2.0 * W * W);
    r.root_plus = {-k * k / (4.0 * W * W), W + k / (2.0 * W) - k * k / (8.0 * W * W * W)};
    r.gamma = k * k / (2.0 * W * W);
    return r;
}

PerturbativePoles perturbative_kg(const ModelParams& p)
{
    validate(p);
    const double k = p.kappa;
    const double W = p.bare_frequency;
    const double w0 = p.mass_gap;
    if (!(w0 < W))
        throw InvalidArgument("perturbative_kg: requires omega0 < Omega0");
    const double gap2 = (W - w0) * (W + w0);
    const double s = std::sqrt(gap2);
    PerturbativePoles r;
    r.root0 = -w0 * w0 + k * k / 4.0 - k * k * k / (2.0 * gap2);
    r.root_plus = {-W * W - k, -k * k / (2.0 * s)};
    r.gamma = k * k / (2.0 * W * s);
    return r;
}

double perturbative_bound_frequency(const ModelParams& p)
{
    validate(p);
    const double k = p.kappa;
    const double W = p.bare_frequency;
    const double w0 = p.mass_gap;
    if (!(w0 > W))
        throw InvalidArgument("perturbative_bound_frequency: requires omega0 > Omega0");
    const double s = std::sqrt((w0 - W) * (w0 + W));
    return W + k / (2.0 * W) - (2.0 * W * W + s) / (W * W * W * s) * k * k / 8.0;
}

} // namespace springstring
