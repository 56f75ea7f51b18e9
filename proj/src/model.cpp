#include "springstring/model.hpp"

#include <cmath>
#include <sstream>

namespace springstring {

namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

void check_state(const FieldState& state)
{
    if (state.xi.size() != state.pi.size())
        throw InvalidArgument("field state: xi and pi have different lengths");
    if (state.xi.size() < 3 || state.xi.size() % 2 == 0)
        throw InvalidArgument("field state: node count must be odd and at least 3");
}

} // namespace

void validate(const ModelParams& p)
{
    if (!finite_nonneg(p.kappa))
        throw InvalidArgument("kappa must be finite and >= 0");
    if (!finite_nonneg(p.mass_gap))
        throw InvalidArgument("omega0 (mass gap) must be finite and >= 0");
    if (!std::isfinite(p.bare_frequency) || p.bare_frequency <= 0.0)
        throw InvalidArgument("Omega0 (oscillator frequency) must be finite and > 0");
}

std::string describe(const ModelParams& p)
{
    std::ostringstream os;
    os.precision(17);
    os << "kappa=" << p.kappa << " omega0=" << p.mass_gap << " Omega0=" << p.bare_frequency;
    return os.str();
}

double shifted_frequency(const ModelParams& p)
{
    validate(p);
    return std::sqrt(p.bare_frequency * p.bare_frequency + p.kappa);
}

Complex dispersion_k(double omega, const ModelParams& p)
{
    validate(p);
    if (!std::isfinite(omega) || omega < 0.0)
        throw InvalidArgument("dispersion_k: omega must be finite and >= 0");
    const double w0 = p.mass_gap;
    // (ω − ω₀)(ω + ω₀) keeps precision close to the branch point.
    const double d = (omega - w0) * (omega + w0);
    if (d >= 0.0)
        return {std::sqrt(d), 0.0};
    return {0.0, std::sqrt(-d)};
}

double dispersion_omega(double k, const ModelParams& p)
{
    validate(p);
    return std::hypot(p.mass_gap, k);
}

double mean_energy_current(Complex amplitude, double omega, int direction, const ModelParams& p)
{
    if (direction != 1 && direction != -1)
        throw InvalidArgument("mean_energy_current: direction must be +1 or -1");
    if (omega <= p.mass_gap) {
        validate(p);
        return 0.0;
    }
    const double k = dispersion_k(omega, p).real();
    return direction * k * omega * std::norm(amplitude) / 2.0;
}

double oscillator_energy(const FieldState& state, const ModelParams& p)
{
    check_state(state);
    const double xi0 = state.xi[(state.xi.size() - 1) / 2];
    const double W = p.bare_frequency;
    const double stretch = state.x_osc - xi0;
    return 0.5 * state.p_osc * state.p_osc + 0.5 * W * W * state.x_osc * state.x_osc
         + 0.5 * p.kappa * stretch * stretch;
}

EnergySplit string_energy_split(const FieldState& state, double dx, const ModelParams& p)
{
    check_state(state);
    if (!(dx > 0.0))
        throw InvalidArgument("dx must be > 0");
    const std::size_t n = state.xi.size();
    const std::size_t c = (n - 1) / 2;
    const double w2 = p.mass_gap * p.mass_gap;
    EnergySplit out;

    auto add = [&](std::size_t i, double amount) {
        if (i < c)
            out.left += amount;
        else if (i > c)
            out.right += amount;
        else {
            out.left += 0.5 * amount;
            out.right += 0.5 * amount;
        }
    };

    for (std::size_t i = 0; i < n; ++i) {
        const double weight = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        const double pi = state.pi[i];
        const double xi = state.xi[i];
        add(i, 0.5 * weight * (pi * pi + w2 * xi * xi) * dx);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double g = (state.xi[i + 1] - state.xi[i]) / dx;
        const double e = 0.5 * g * g * dx;
        // bond (i, i+1) lies left of the centre iff i+1 <= c
        if (i + 1 <= c)
            out.left += e;
        else
            out.right += e;
    }
    return out;
}

double total_energy(const FieldState& state, double dx, const ModelParams& p)
{
    validate(p);
    const EnergySplit s = string_energy_split(state, dx, p);
    return oscillator_energy(state, p) + s.left + s.right;
}

} // namespace springstring
