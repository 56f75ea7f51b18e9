#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "springstring/model.hpp"
#include "springstring/spectral.hpp"
#include "springstring/timedomain.hpp"

using namespace springstring;

namespace {

GridSpec closed(double length, double dx)
{
    const auto n = static_cast<std::size_t>(std::lround(length / dx)) + 1;
    return GridSpec{.n_nodes = n | 1u, .dx = dx, .dt = 0.5 * dx, .boundary = Dirichlet{}};
}

// Even standing wave cos(πx/ℓ) on the clamped string, at rest.
FieldState standing_wave(const GridSpec& g)
{
    FieldState s = zero_state(g);
    for (std::size_t i = 1; i + 1 < g.n_nodes; ++i)
        s.xi[i] = std::cos(kPi * g.position(i) / g.length());
    return s;
}

// Smooth state exciting both oscillator and string.
FieldState smooth_state(const GridSpec& g)
{
    FieldState s = zero_state(g);
    for (std::size_t i = 1; i + 1 < g.n_nodes; ++i) {
        const double x = g.position(i);
        s.xi[i] = std::exp(-x * x / 2.0) * std::cos(1.5 * x);
        s.pi[i] = 0.3 * std::exp(-(x - 1.0) * (x - 1.0));
    }
    s.x_osc = 0.4;
    return s;
}

} // namespace

TEST_CASE("grid validation")
{
    CHECK_NOTHROW(validate(GridSpec{.n_nodes = 11, .dx = 0.1, .dt = 0.05}));
    CHECK_THROWS_AS(validate(GridSpec{.n_nodes = 11, .dx = 0.1, .dt = 0.06}), CflError);
    CHECK_THROWS_AS(validate(GridSpec{.n_nodes = 10, .dx = 0.1, .dt = 0.05}), InvalidArgument);
    CHECK_THROWS_AS(validate(GridSpec{.n_nodes = 101, .dx = 0.1, .dt = 0.05, .boundary = Sponge{0.5, 1.0}}),
                    InvalidArgument);
    CHECK_THROWS_AS(validate(GridSpec{.n_nodes = 101, .dx = 0.1, .dt = 0.05, .boundary = Sponge{5.0, 1.0}}),
                    InvalidArgument);
    CHECK_NOTHROW(validate(GridSpec{.n_nodes = 101, .dx = 0.1, .dt = 0.05, .boundary = Sponge{2.0, 1.0}}));
    const GridSpec s = sponge_grid(80.0, 25.0, 0.02);
    CHECK(s.n_nodes == 8001);
    CHECK(s.dt == 0.01);
    CHECK(s.has_sponge());
}

TEST_CASE("the zero state is a fixed point")
{
    const GridSpec g = closed(10.0, 0.05);
    const ModelParams p{.kappa = 0.5, .mass_gap = 0.3, .bare_frequency = 1.0};
    FieldState s = zero_state(g);
    advance(s, g, p, 1000);
    for (std::size_t i = 0; i < g.n_nodes; ++i) {
        CHECK(s.xi[i] == 0.0);
        CHECK(s.pi[i] == 0.0);
    }
    CHECK(s.x_osc == 0.0);
    CHECK(s.t == doctest::Approx(25.0));
}

TEST_CASE("uncoupled standing wave oscillates at the lattice frequency")
{
    const ModelParams p{.kappa = 0.0, .mass_gap = 0.5, .bare_frequency = 1.0};
    const GridSpec g = closed(10.0, 0.02);
    FieldState s = standing_wave(g);
    const double k = kPi / g.length();
    const double w = std::sqrt(p.mass_gap * p.mass_gap + k * k);
    const double period = 2.0 * kPi / w;
    const auto n = static_cast<std::size_t>(std::lround(period / g.dt));
    advance(s, g, p, n);
    // back to the start up to the sub-step rounding of the period and O(dx²)
    const double lag = static_cast<double>(n) * g.dt - period;
    CHECK(std::abs(s.xi[g.center()] - std::cos(w * lag)) < 1e-3);
    CHECK(s.x_osc == 0.0);
}

TEST_CASE("energy error is bounded and second order in dt")
{
    const ModelParams p{.kappa = 0.6, .mass_gap = 0.4, .bare_frequency = 1.1};
    struct Deviation {
        double first_half = 0.0;
        double second_half = 0.0;
    };
    auto deviation = [&](double dx) {
        const GridSpec g = closed(20.0, dx);
        FieldState s = smooth_state(g);
        const double e0 = total_energy(s, g.dx, p);
        const auto chunk = static_cast<std::size_t>(std::lround(1.0 / g.dt));
        Deviation d;
        for (int i = 0; i < 100; ++i) {
            advance(s, g, p, chunk);
            const double e = std::abs(total_energy(s, g.dx, p) - e0) / e0;
            double& slot = i < 50 ? d.first_half : d.second_half;
            slot = std::max(slot, e);
        }
        return d;
    };
    const Deviation coarse = deviation(0.02);
    const Deviation fine = deviation(0.01);
    CHECK(coarse.second_half < 1.5 * coarse.first_half);
    CHECK(fine.second_half < 1.5 * fine.first_half);
    const double ratio = std::max(coarse.first_half, coarse.second_half) / std::max(fine.first_half, fine.second_half);
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
}

TEST_CASE("the scheme is time-reversible")
{
    const ModelParams p{.kappa = 0.6, .mass_gap = 0.4, .bare_frequency = 1.1};
    const GridSpec g = closed(20.0, 0.02);
    const FieldState s0 = smooth_state(g);
    FieldState s = s0;
    advance(s, g, p, 5000);
    for (auto& v : s.pi)
        v = -v;
    s.p_osc = -s.p_osc;
    advance(s, g, p, 5000);
    double err = std::abs(s.x_osc - s0.x_osc);
    for (std::size_t i = 0; i < g.n_nodes; ++i)
        err = std::max(err, std::abs(s.xi[i] - s0.xi[i]));
    CHECK(err < 1e-8);
}

TEST_CASE("second-order convergence in dx")
{
    const ModelParams p{.kappa = 0.0, .mass_gap = 0.0, .bare_frequency = 1.0};
    const double T = 3.0;
    auto error = [&](double dx) {
        const GridSpec g = closed(2.0, dx);
        FieldState s = standing_wave(g);
        advance(s, g, p, static_cast<std::size_t>(std::lround(T / g.dt)));
        double e = 0.0;
        for (std::size_t i = 0; i < g.n_nodes; ++i)
            e = std::max(e, std::abs(s.xi[i] - std::cos(kPi * T / 2.0) * std::cos(kPi * g.position(i) / 2.0)));
        return e;
    };
    const double r = error(0.04) / error(0.02);
    CHECK(r > 3.5);
    CHECK(r < 4.5);
}

TEST_CASE("uncoupled oscillator keeps its energy")
{
    const ModelParams p{.kappa = 0.0, .mass_gap = 0.0, .bare_frequency = 1.0};
    const GridSpec g = sponge_grid(10.0, 2.0, 0.02);
    const TimeSeries ts = simulate_radiation(p, 1.0, 50.0, g, {.stride = 10});
    for (double e : ts.e_osc)
        CHECK(std::abs(e - 0.5) < 1e-4);
    CHECK_THROWS_AS(simulate_radiation(p, 1.0, 50.0, closed(20.0, 0.02)), InvalidArgument);
}

TEST_CASE("decay fit recovers a synthetic rate")
{
    TimeSeries ts;
    ts.dx = 0.02;
    const double gamma = 0.02;
    for (int i = 0; i < 40000; ++i) {
        const double t = 0.01 * i;
        const double x = std::exp(-0.5 * gamma * t) * std::cos(1.3 * t);
        const double v = -std::exp(-0.5 * gamma * t) * 1.3 * std::sin(1.3 * t);
        ts.times.push_back(t);
        ts.x_osc.push_back(x);
        ts.p_osc.push_back(v);
        // a ripple at twice the frequency gives E_osc proper interior maxima
        ts.e_osc.push_back(std::exp(-gamma * t) * (1.0 + 0.1 * std::cos(2.6 * t)));
        ts.e_total.push_back(1.0);
    }
    const DecayFit f = fit_decay_rate(ts);
    CHECK(f.n_maxima >= 5);
    CHECK(f.gamma == doctest::Approx(gamma).epsilon(0.01));
    CHECK(f.r_squared > 0.999);
    CHECK(f.decaying);
}

TEST_CASE("spectrum of a pure tone")
{
    std::vector<double> v;
    const double dt = 0.05;
    for (int i = 0; i < 8192; ++i)
        v.push_back(std::cos(1.3 * dt * i) + 0.5);
    const auto peaks = spectrum_peaks(v, dt);
    REQUIRE(!peaks.empty());
    const auto top = std::max_element(peaks.begin(), peaks.end(),
                                      [](const auto& a, const auto& b) { return a.amplitude < b.amplitude; });
    CHECK(std::abs(top->frequency - 1.3) < 0.1 * 2.0 * kPi / (8192 * dt));
    CHECK_THROWS_AS(spectrum_peaks(std::vector<double>(100, 1.0), dt), InvalidArgument);
}

TEST_CASE("a packet crosses the uncoupled origin untouched")
{
    const ModelParams p{.kappa = 0.0, .mass_gap = 0.0, .bare_frequency = 1.0};
    const double k0 = 2.0, sigma = 10.0;
    const GridSpec g = wavepacket_grid(p, k0, sigma, 0.02);
    const WavepacketResult r = simulate_wavepacket(p, k0, sigma, g);
    CHECK(r.transmitted_fraction > 0.9999);
    CHECK(r.reflected_fraction < 1e-4);
    CHECK(r.energy_balance == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.launch_position == doctest::Approx(-60.0));
    CHECK_THROWS_AS(simulate_wavepacket(p, k0, 1.0, g), InvalidArgument);
}

TEST_CASE("bound state stays bound")
{
    const ModelParams p{.kappa = 0.3, .mass_gap = 1.5, .bare_frequency = 1.0};
    const GridSpec g = sponge_grid(30.0, 10.0, 0.02);
    FieldState s = bound_mode_state(p, g);
    const double e0 = total_energy(s, g.dx, p);
    run(s, 100.0, g, p);
    CHECK(std::abs(total_energy(s, g.dx, p) - e0) / e0 < 1e-3);
    CHECK_THROWS_AS(bound_mode_state({.kappa = 0.3, .mass_gap = 0.5, .bare_frequency = 1.0}, g), InvalidArgument);
}

TEST_CASE("CSV output")
{
    const ModelParams p{.kappa = 0.5, .mass_gap = 0.0, .bare_frequency = 1.0};
    const GridSpec g = sponge_grid(10.0, 2.0, 0.05);
    const TimeSeries ts = simulate_radiation(p, 1.0, 1.0, g, {.stride = 5, .probe_nodes = {g.center() + 4}});
    std::ostringstream os;
    write_timeseries_csv(os, ts);
    std::string header;
    std::getline(std::istringstream(os.str()) >> std::ws, header);
    CHECK(header == "t,x_osc,p_osc,e_osc,e_total,probe_" + std::to_string(g.center() + 4));
    CHECK(ts.probes.size() == 1);
    CHECK(ts.probes[0].size() == ts.size());

    FieldState s = zero_state(g);
    std::ostringstream snap;
    write_snapshot_csv(snap, s, g);
    CHECK(snap.str().rfind("x,xi,pi\n", 0) == 0);
}
