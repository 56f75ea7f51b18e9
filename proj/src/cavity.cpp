#include "springstring/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "springstring/csv.hpp"
#include "springstring/model.hpp"

namespace springstring {

namespace {

void check_length(double length)
{
    if (!std::isfinite(length) || !(length > 0.0))
        throw InvalidArgument("cavity length must be finite and > 0");
}

void check_branches(int n_max)
{
    if (n_max < 0)
        throw InvalidArgument("n_max must be >= 0");
}

// tan η = num/den
struct PhaseParts {
    double num;
    double den;
};

PhaseParts phase_parts(double k, const ModelParams& p)
{
    const double omega = dispersion_omega(k, p);
    const double W0 = p.bare_frequency;
    const double Wk = std::sqrt(W0 * W0 + p.kappa);
    return {p.kappa * (omega - W0) * (omega + W0), 2.0 * k * (omega - Wk) * (omega + Wk)};
}

double principal_phase(double k, const ModelParams& p)
{
    if (p.kappa == 0.0)
        return 0.0;
    const auto [num, den] = phase_parts(k, p);
    if (den == 0.0)
        return -kPi / 2.0; // limit from below Ωκ
    return std::atan(num / den);
}

double residual(double k, double length, const ModelParams& p)
{
    return std::abs(std::remainder(0.5 * k * length - principal_phase(k, p) - kPi / 2.0, kPi));
}

} // namespace

double continuous_phase(double k, const ModelParams& p)
{
    validate(p);
    if (!(k > 0.0))
        throw InvalidArgument("continuous_phase: k must be > 0");
    const double eta = principal_phase(k, p);
    if (p.kappa == 0.0)
        return eta;
    const auto [num, den] = phase_parts(k, p);
    (void)num;
    // tan η runs from −∞ to +∞ through Ωκ; shift the upper side down by π
    return den > 0.0 && shifted_frequency(p) > p.mass_gap ? eta - kPi : eta;
}

EvenSpectrum even_spectrum(double length, int n_max, const ModelParams& p)
{
    validate(p);
    check_length(length);
    check_branches(n_max);

    // η_c ∈ [−π, π/2], so ½kℓ − η_c = π/2 + nπ needs k ≤ 2(π + (n + 1)π)/ℓ
    const double target_max = kPi / 2.0 + n_max * kPi;
    const double k_hi = 2.0 * (target_max + kPi) / length;
    const double h = std::min(kPi / (8.0 * length), 1e-3 * std::max(1.0, k_hi) / 4.0);
    const std::size_t n_grid = static_cast<std::size_t>(std::ceil(k_hi / h));

    std::vector<double> ks;
    ks.reserve(n_grid + 2);
    for (std::size_t i = 1; i <= n_grid; ++i)
        ks.push_back(k_hi * static_cast<double>(i) / static_cast<double>(n_grid));
    // put a node exactly on the resonance so no bracket straddles it
    const double Wk = shifted_frequency(p);
    if (p.kappa > 0.0 && Wk > p.mass_gap) {
        const double k_res = std::sqrt((Wk - p.mass_gap) * (Wk + p.mass_gap));
        if (k_res < k_hi) {
            ks.push_back(k_res);
            std::sort(ks.begin(), ks.end());
            ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
        }
    }

    auto F = [&](double k) { return 0.5 * k * length - continuous_phase(k, p); };
    std::vector<double> fs(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i)
        fs[i] = F(ks[i]);

    EvenSpectrum out;
    for (int n = 0; n <= n_max; ++n) {
        const double target = kPi / 2.0 + n * kPi;
        bool found = false;
        for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
            const double g0 = fs[i] - target;
            const double g1 = fs[i + 1] - target;
            if (g0 == 0.0 || (g0 < 0.0) != (g1 < 0.0)) {
                if (g1 == 0.0)
                    continue; // caught as the left end of the next interval
                double lo = ks[i], hi = ks[i + 1];
                double glo = g0;
                if (g0 != 0.0) {
                    for (int it = 0; it < 200; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        if (mid <= lo || mid >= hi)
                            break;
                        const double gm = F(mid) - target;
                        if (gm == 0.0) {
                            lo = hi = mid;
                            break;
                        }
                        if ((gm < 0.0) == (glo < 0.0)) {
                            lo = mid;
                            glo = gm;
                        } else {
                            hi = mid;
                        }
                    }
                }
                const double k = g0 == 0.0 ? ks[i] : 0.5 * (lo + hi);
                out.levels.push_back({n, k, dispersion_omega(k, p), residual(k, length, p)});
                found = true;
            }
        }
        if (!found)
            out.missing_branches.push_back(n);
    }
    std::sort(out.levels.begin(), out.levels.end(),
              [](const CavityLevel& a, const CavityLevel& b) { return a.k < b.k; });
    return out;
}

std::vector<double> odd_spectrum(double length, int n_max)
{
    check_length(length);
    check_branches(n_max);
    std::vector<double> ks;
    for (int n = 1; n <= n_max; ++n)
        ks.push_back(2.0 * kPi * n / length);
    return ks;
}

std::vector<double> free_spectrum(double length, int n_max, const ModelParams& p)
{
    validate(p);
    check_length(length);
    check_branches(n_max);
    std::vector<double> ws;
    for (int n = 0; n <= n_max; ++n)
        ws.push_back(dispersion_omega(kPi * (2 * n + 1) / length, p));
    return ws;
}

int count_levels(const std::vector<double>& omegas, double lo, double hi)
{
    return static_cast<int>(std::count_if(omegas.begin(), omegas.end(),
                                          [&](double w) { return w > lo && w <= hi; }));
}

std::vector<double> level_frequencies(const EvenSpectrum& s)
{
    std::vector<double> ws;
    for (const auto& l : s.levels)
        ws.push_back(l.omega);
    return ws;
}

void write_cavity_csv(std::ostream& os, const EvenSpectrum& even, const std::vector<double>& odd_k,
                      const std::vector<double>& free_omega, double length, const ModelParams& p)
{
    os << "n,branch,k,omega,residual\n";
    auto row = [&](int n, const char* branch, double k, double w, double r) {
        os << n << ',' << branch << ',' << fmt17(k) << ',' << fmt17(w) << ',' << fmt17(r) << '\n';
    };
    for (const auto& l : even.levels)
        row(l.branch, "even", l.k, l.omega, l.residual);
    for (std::size_t i = 0; i < odd_k.size(); ++i)
        row(static_cast<int>(i) + 1, "odd", odd_k[i], dispersion_omega(odd_k[i], p),
            std::abs(std::sin(0.5 * odd_k[i] * length)));
    for (std::size_t i = 0; i < free_omega.size(); ++i)
        row(static_cast<int>(i), "free", kPi * (2.0 * static_cast<double>(i) + 1.0) / length, free_omega[i], 0.0);
}

void write_graphical_csv(std::ostream& os, double length, double omega_max, std::size_t n, const ModelParams& p)
{
    validate(p);
    check_length(length);
    if (!(omega_max > p.mass_gap) || n < 2)
        throw InvalidArgument("graphical curves: need omega_max > omega0 and n >= 2");
    os << "omega,k,tan_eta,tan_half_kl_minus_half_pi\n";
    for (std::size_t i = 1; i <= n; ++i) {
        const double w = p.mass_gap + (omega_max - p.mass_gap) * static_cast<double>(i) / static_cast<double>(n);
        const double k = std::sqrt((w - p.mass_gap) * (w + p.mass_gap));
        const auto [num, den] = phase_parts(k, p);
        const double tan_eta = p.kappa == 0.0 ? 0.0 : num / den;
        write_csv_row(os, {w, k, tan_eta, std::tan(0.5 * k * length - kPi / 2.0)});
    }
}

} // namespace springstring
