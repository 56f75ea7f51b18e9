#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <vector>

#include "springstring/model.hpp"
#include "springstring/scattering.hpp"

using namespace springstring;

namespace {

const ModelParams kFig{.kappa = 0.5, .mass_gap = 0.3, .bare_frequency = 1.0};

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

struct Sample {
    ModelParams p;
    double omega;
};

std::vector<Sample> random_samples(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<Sample> out;
    while (out.size() < n) {
        const ModelParams p{.kappa = 3.0 * U(rng), .mass_gap = 2.0 * U(rng), .bare_frequency = 0.1 + 2.0 * U(rng)};
        const double omega = p.mass_gap + 1e-3 + 5.0 * U(rng);
        out.push_back({p, omega});
    }
    return out;
}

} // namespace

TEST_CASE("antiresonance and resonance limits")
{
    const auto at_bare = coefficients(1.0, kFig);
    CHECK(std::abs(at_bare.rho) < 1e-15);
    CHECK(std::abs(at_bare.tau - 1.0) < 1e-15);

    // near Ωκ, τ vanishes linearly: |τ| ≈ 4kΩκ²ε/(κ(Ωκ² − Ω₀²)) for ω = Ωκ(1 ± ε)
    const double Wk = shifted_frequency(kFig);
    const double k = dispersion_k(Wk, kFig).real();
    const double slope = 4.0 * k * Wk * Wk / (kFig.kappa * kFig.kappa);
    for (double eps : {1e-6, 1e-9}) {
        for (double w : {Wk * (1 - eps), Wk * (1 + eps)}) {
            const auto c = coefficients(w, kFig);
            CHECK(std::abs(c.tau) / eps == doctest::Approx(slope).epsilon(1e-3));
            CHECK(std::abs(c.rho + 1.0) == doctest::Approx(std::abs(c.tau)).epsilon(1e-6));
        }
    }

    const auto uv = coefficients(1e6, kFig);
    CHECK(std::abs(uv.rho) < 1e-6);
    CHECK(std::abs(uv.tau - 1.0) < 1e-6);
}

TEST_CASE("singular frequencies are typed errors")
{
    CHECK_THROWS_AS(coefficients(shifted_frequency(kFig), kFig), PoleError);
    CHECK_THROWS_AS(coefficients(0.3, kFig), BranchPointError);
    CHECK_THROWS_AS(coefficients(-1.0, kFig), InvalidArgument);
    CHECK_THROWS_AS(solve_scattering_direct(0.2, kFig), InvalidArgument);
    CHECK_THROWS_AS(t_matrix(shifted_frequency(kFig), kFig), PoleError);
}

TEST_CASE("continuation below the gap")
{
    const ModelParams p{.kappa = 0.4, .mass_gap = 1.0, .bare_frequency = 0.8};
    const auto c = coefficients(0.6, p);
    CHECK_FALSE(c.eta.has_value());
    CHECK(c.k.real() == 0.0);
    CHECK(c.k.imag() > 0.0);
    CHECK(std::abs(1.0 + c.rho - c.tau) < 1e-14);
    // an evanescent channel carries no flux: ρ and τ are real
    CHECK(std::abs(c.rho.imag()) < 1e-14);
}

TEST_CASE("closed forms agree with the direct linear solve")
{
    const auto c = coefficients(1.7, kFig);
    const auto d = solve_scattering_direct(1.7, kFig);
    CHECK(rel(c.rho, d.rho) < 1e-12);
    CHECK(rel(c.tau, d.tau) < 1e-12);
    CHECK(rel(c.chi, d.chi) < 1e-12);

    for (const auto& s : random_samples(500, 7)) {
        if (s.omega == shifted_frequency(s.p))
            continue;
        const auto a = coefficients(s.omega, s.p);
        const auto b = solve_scattering_direct(s.omega, s.p);
        CHECK(rel(a.rho, b.rho) < 1e-12);
        CHECK(rel(a.tau, b.tau) < 1e-12);
        CHECK(rel(a.chi, b.chi) < 1e-12);
    }

    const auto free = solve_scattering_direct(1.3, {.kappa = 0.0, .mass_gap = 0.2, .bare_frequency = 1.0});
    CHECK(free.rho == Complex{0.0});
    CHECK(free.tau == Complex{1.0});
    CHECK(std::isfinite(std::abs(free.chi)));

    // the direct system stays regular at Ωκ, where the closed forms have a pole
    const auto at_res = solve_scattering_direct(shifted_frequency(kFig), kFig);
    CHECK(std::abs(at_res.rho + 1.0) < 1e-12);
}

TEST_CASE("coefficient identities over random samples")
{
    for (const auto& s : random_samples(1000, 11)) {
        const auto c = coefficients(s.omega, s.p);
        const Complex r = c.rho, t = c.tau;
        CHECK(std::abs(1.0 + r - t) < 1e-12);
        CHECK(std::abs(std::norm(r) + std::norm(t) - 1.0) < 1e-12);
        CHECK(std::abs(std::conj(t) - t / (r + t)) < 1e-12);
        CHECK(std::abs(std::conj(r) + r / (r + t)) < 1e-12);

        // flux balance: incident = reflected + transmitted
        const double in = mean_energy_current(1.0, s.omega, 1, s.p);
        const double out = -mean_energy_current(r, s.omega, -1, s.p) + mean_energy_current(t, s.omega, 1, s.p);
        CHECK(std::abs(in - out) <= 1e-12 * std::max(1.0, in));
    }
}

TEST_CASE("S and T matrices")
{
    const ModelParams free{.kappa = 0.0, .mass_gap = 0.3, .bare_frequency = 1.0};
    CHECK(distance_from_identity(s_matrix(2.0, free)) == 0.0);
    CHECK(distance_from_identity(t_matrix(2.0, free)) == 0.0);

    for (const auto& s : random_samples(300, 5)) {
        const Matrix2 S = s_matrix(s.omega, s.p);
        CHECK(distance_from_identity(S * S.adjoint()) < 1e-12);
        const Matrix2 T = t_matrix(s.omega, s.p);
        CHECK(std::abs(T.det() - 1.0) < 1e-12);
        const auto back = from_transfer(T);
        const auto c = coefficients(s.omega, s.p);
        CHECK(rel(back.rho, c.rho) < 1e-12);
        CHECK(rel(back.tau, c.tau) < 1e-12);
        // S entries rebuilt from T: τ* = 1/T₂₂*, ρ* = T₁₂*/T₂₂*
        CHECK(rel(S(0, 0), std::conj(1.0 / T(1, 1))) < 1e-12);
        CHECK(rel(S(0, 1), std::conj(T(0, 1) / T(1, 1))) < 1e-12);
    }

    // approaching Ωκ the S matrix becomes off-diagonal
    const double Wk = shifted_frequency(kFig);
    const Matrix2 S = s_matrix(Wk * (1 + 1e-9), kFig);
    CHECK(std::abs(S(0, 0)) < 1e-7);
    CHECK(std::abs(std::abs(S(0, 1)) - 1.0) < 1e-8);
}

TEST_CASE("transfer composition")
{
    const Matrix2 T = t_matrix(1.7, kFig);
    const std::vector<Matrix2> one{T};
    CHECK(distance_from_identity(compose_transfer(one) * T.inverse()) < 1e-14);

    const std::vector<Matrix2> pair{T, T.inverse()};
    CHECK(distance_from_identity(compose_transfer(pair)) < 1e-12);

    const std::vector<Matrix2> many{T, t_matrix(0.9, kFig), t_matrix(2.4, {.kappa = 1.2, .mass_gap = 0.3, .bare_frequency = 1.4})};
    CHECK(std::abs(compose_transfer(many).det() - 1.0) < 1e-12);

    CHECK_THROWS_AS(compose_transfer(std::vector<Matrix2>{}), InvalidArgument);
    Matrix2 bad = T;
    bad(0, 0) *= 2.0;
    CHECK_THROWS_AS(compose_transfer(std::vector<Matrix2>{bad}), InvalidArgument);
}

TEST_CASE("resonance quality factor")
{
    const auto q0 = resonance_quality({.kappa = 0.05, .mass_gap = 0.0, .bare_frequency = 1.0});
    CHECK(q0.q_perturbative == doctest::Approx(800.0));
    CHECK(std::abs(q0.q_numeric / q0.q_perturbative - 1.0) < 0.10);

    const auto q6 = resonance_quality({.kappa = 0.05, .mass_gap = 0.6, .bare_frequency = 1.0});
    CHECK(q6.q_perturbative == doctest::Approx(640.0));

    // the ratio error shrinks with κ
    double last = 1.0;
    for (double kappa : {0.1, 0.05, 0.025}) {
        const auto q = resonance_quality({.kappa = kappa, .mass_gap = 0.3, .bare_frequency = 1.0});
        const double err = std::abs(q.q_numeric / q.q_perturbative - 1.0);
        CHECK(err < last);
        last = err;
        CHECK(std::abs(coefficients(q.omega_low, {.kappa = kappa, .mass_gap = 0.3, .bare_frequency = 1.0}).rho)
              == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
    }

    CHECK_THROWS_AS(resonance_quality({.kappa = 0.0, .mass_gap = 0.3, .bare_frequency = 1.0}), BracketError);
    // Ωκ below the gap: no resonance
    CHECK_THROWS_AS(resonance_quality({.kappa = 0.5, .mass_gap = 2.0, .bare_frequency = 1.0}), BracketError);
}

TEST_CASE("sweep")
{
    const auto rows = sweep(0.31, 5.0, 2000, kFig);
    REQUIRE(rows.size() == 2000);
    CHECK(rows.front().c.omega == 0.31);
    CHECK(rows.back().c.omega == 5.0);
    double peak = 0.0, peak_w = 0.0, dip = 1.0, dip_w = 0.0;
    for (const auto& r : rows) {
        CHECK(std::abs(std::norm(r.c.rho) + std::norm(r.c.tau) - 1.0) < 1e-12);
        const double a = std::abs(r.c.rho);
        if (a > peak) {
            peak = a;
            peak_w = r.c.omega;
        }
        if (a < dip) {
            dip = a;
            dip_w = r.c.omega;
        }
    }
    const double step = (5.0 - 0.31) / 1999;
    CHECK(std::abs(peak_w - shifted_frequency(kFig)) <= step);
    CHECK(std::abs(dip_w - 1.0) <= step);

    // Ωκ below the gap: |ρ| falls monotonically from 1
    const ModelParams high_gap{.kappa = 0.5, .mass_gap = 2.0, .bare_frequency = 1.0};
    const auto mono = sweep(2.0001, 6.0, 400, high_gap);
    CHECK(std::abs(mono.front().c.rho) > 0.99);
    for (std::size_t i = 1; i < mono.size(); ++i)
        CHECK(std::abs(mono[i].c.rho) < std::abs(mono[i - 1].c.rho));

    // a sample exactly on Ωκ is nudged off the pole and flagged
    const ModelParams simple{.kappa = 3.0, .mass_gap = 0.0, .bare_frequency = 1.0}; // Ωκ = 2
    const auto hit = sweep(1.0, 3.0, 5, simple);
    CHECK(hit[2].shifted);
    CHECK(hit[2].c.omega == doctest::Approx(2.25));

    CHECK_THROWS_AS(sweep(0.2, 5.0, 10, kFig), InvalidArgument);
    CHECK_THROWS_AS(sweep(1.0, 0.9, 10, kFig), InvalidArgument);
    CHECK_THROWS_AS(sweep(1.0, 2.0, 1, kFig), InvalidArgument);
}

TEST_CASE("sweep csv")
{
    std::ostringstream os;
    write_sweep_csv(os, sweep(0.5, 1.5, 3, kFig));
    const std::string text = os.str();
    CHECK(text.rfind("omega,k,re_rho,im_rho,abs_rho,re_tau,im_tau,abs_tau,eta,re_chi,im_chi\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
    CHECK(text.find("\n0.5,") != std::string::npos);
}

TEST_CASE("sweep output does not depend on the thread count")
{
    setenv("SPRING_STRING_THREADS", "1", 1);
    std::ostringstream a;
    write_sweep_csv(a, sweep(0.31, 5.0, 777, kFig));
    setenv("SPRING_STRING_THREADS", "4", 1);
    std::ostringstream b;
    write_sweep_csv(b, sweep(0.31, 5.0, 777, kFig));
    unsetenv("SPRING_STRING_THREADS");
    CHECK(a.str() == b.str());
}
