#include <doctest.h>

#include <cmath>
#include <random>

#include "springstring/model.hpp"

using namespace springstring;

namespace {

GridSpec closed_grid(std::size_t n, double dx)
{
    return GridSpec{.n_nodes = n, .dx = dx, .dt = 0.5 * dx, .boundary = Dirichlet{}};
}

FieldState blank(std::size_t n)
{
    FieldState s;
    s.xi.assign(n, 0.0);
    s.pi.assign(n, 0.0);
    return s;
}

} // namespace

TEST_CASE("parameter validation")
{
    CHECK_NOTHROW(validate(ModelParams{.kappa = 0.0, .mass_gap = 0.0, .bare_frequency = 1.0}));
    CHECK_THROWS_AS(validate(ModelParams{.kappa = -0.1, .mass_gap = 0.0, .bare_frequency = 1.0}), InvalidArgument);
    CHECK_THROWS_AS(validate(ModelParams{.kappa = 0.1, .mass_gap = -1.0, .bare_frequency = 1.0}), InvalidArgument);
    CHECK_THROWS_AS(validate(ModelParams{.kappa = 0.1, .mass_gap = 0.0, .bare_frequency = 0.0}), InvalidArgument);
    CHECK_THROWS_AS(validate(ModelParams{.kappa = NAN, .mass_gap = 0.0, .bare_frequency = 1.0}), InvalidArgument);
}

TEST_CASE("shifted frequency")
{
    CHECK(shifted_frequency({.kappa = 0.0, .mass_gap = 0.0, .bare_frequency = 1.0}) == 1.0);
    CHECK(shifted_frequency({.kappa = 0.25, .mass_gap = 0.0, .bare_frequency = 1.0})
          == doctest::Approx(1.1180339887).epsilon(1e-10));
    CHECK(shifted_frequency({.kappa = 3.0, .mass_gap = 0.0, .bare_frequency = 2.0}) == doctest::Approx(std::sqrt(7.0)));

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(0.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const ModelParams p{.kappa = U(rng), .mass_gap = U(rng), .bare_frequency = 0.1 + U(rng)};
        CHECK(shifted_frequency(p) >= p.bare_frequency);
    }
}

TEST_CASE("dispersion relation")
{
    const ModelParams gap3{.kappa = 0.0, .mass_gap = 3.0, .bare_frequency = 1.0};
    CHECK(dispersion_k(3.0, gap3) == Complex{0.0, 0.0});
    CHECK(dispersion_k(5.0, gap3) == Complex{4.0, 0.0});

    const Complex below = dispersion_k(0.5, {.kappa = 0.0, .mass_gap = 1.3, .bare_frequency = 1.0});
    CHECK(below.real() == 0.0);
    CHECK(below.imag() == doctest::Approx(1.2).epsilon(1e-14));

    CHECK(dispersion_omega(0.0, {.kappa = 0.0, .mass_gap = 2.0, .bare_frequency = 1.0}) == 2.0);
    CHECK(dispersion_omega(4.0, gap3) == 5.0);

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-10.0, 10.0);
    for (int i = 0; i < 500; ++i) {
        const double k = U(rng);
        const ModelParams p{.kappa = 0.0, .mass_gap = std::abs(U(rng)) / 2, .bare_frequency = 1.0};
        CHECK(dispersion_omega(k, p) == dispersion_omega(-k, p));
        CHECK(dispersion_k(dispersion_omega(k, p), p).real() == doctest::Approx(std::abs(k)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(dispersion_k(-1.0, gap3), InvalidArgument);
}

TEST_CASE("mean energy current")
{
    const ModelParams p{.kappa = 0.0, .mass_gap = 3.0, .bare_frequency = 1.0};
    CHECK(mean_energy_current(1.0, 1.5, 1, p) == 0.0);
    CHECK(mean_energy_current(1.0, 1.5, -1, p) == 0.0);
    CHECK(mean_energy_current(1.0, 5.0, 1, p) == doctest::Approx(10.0));
    CHECK(mean_energy_current(Complex{0.0, 2.0}, 5.0, -1, p) == doctest::Approx(-40.0));
    CHECK_THROWS_AS(mean_energy_current(1.0, 5.0, 0, p), InvalidArgument);

    // quadratic in |a|, odd in direction
    for (double a : {0.3, 1.7, 4.0}) {
        const double j = mean_energy_current(a, 4.2, 1, p);
        CHECK(mean_energy_current(2.0 * a, 4.2, 1, p) == doctest::Approx(4.0 * j));
        CHECK(mean_energy_current(a, 4.2, -1, p) == -j);
    }
}

TEST_CASE("total energy of simple configurations")
{
    const ModelParams p{.kappa = 0.7, .mass_gap = 0.4, .bare_frequency = 1.3};
    const GridSpec g = closed_grid(101, 0.05);

    FieldState s = blank(g.n_nodes);
    CHECK(total_energy(s, g.dx, p) == 0.0);

    s.x_osc = 0.8;
    const double W2 = p.bare_frequency * p.bare_frequency + p.kappa;
    CHECK(total_energy(s, g.dx, p) == doctest::Approx(0.5 * W2 * 0.64).epsilon(1e-14));

    // uniform displacement with the oscillator riding along: only the mass gap
    // term survives (the interior; end nodes carry half weight)
    FieldState u = blank(g.n_nodes);
    const double c = 0.3;
    for (auto& v : u.xi)
        v = c;
    u.x_osc = c;
    const double expected_string = 0.5 * p.mass_gap * p.mass_gap * c * c * g.length();
    const double expected_osc = 0.5 * p.bare_frequency * p.bare_frequency * c * c;
    CHECK(total_energy(u, g.dx, p) == doctest::Approx(expected_string + expected_osc).epsilon(1e-13));

    CHECK_THROWS_AS(total_energy(blank(4), g.dx, p), InvalidArgument);
    FieldState bad = blank(11);
    bad.pi.pop_back();
    CHECK_THROWS_AS(total_energy(bad, g.dx, p), InvalidArgument);
}

TEST_CASE("energy is a non-negative quadratic form")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> N(0.0, 1.0);
    const ModelParams p{.kappa = 1.1, .mass_gap = 0.6, .bare_frequency = 0.9};
    for (int trial = 0; trial < 50; ++trial) {
        FieldState s = blank(41);
        for (std::size_t i = 1; i + 1 < 41; ++i) {
            s.xi[i] = N(rng);
            s.pi[i] = N(rng);
        }
        s.x_osc = N(rng);
        s.p_osc = N(rng);
        const double e = total_energy(s, 0.1, p);
        CHECK(e >= 0.0);
        FieldState scaled = s;
        for (auto& v : scaled.xi)
            v *= -2.5;
        for (auto& v : scaled.pi)
            v *= -2.5;
        scaled.x_osc *= -2.5;
        scaled.p_osc *= -2.5;
        CHECK(total_energy(scaled, 0.1, p) == doctest::Approx(6.25 * e).epsilon(1e-12));

        const EnergySplit split = string_energy_split(s, 0.1, p);
        CHECK(split.left + split.right + oscillator_energy(s, p) == doctest::Approx(e).epsilon(1e-13));
    }
}

TEST_CASE("energy split follows parity")
{
    const ModelParams p{.kappa = 0.0, .mass_gap = 0.5, .bare_frequency = 1.0};
    FieldState s = blank(21);
    for (std::size_t i = 1; i < 10; ++i) {
        s.xi[i] = std::sin(0.3 * i);
        s.xi[20 - i] = s.xi[i];
        s.pi[i] = std::cos(0.7 * i);
        s.pi[20 - i] = s.pi[i];
    }
    const EnergySplit e = string_energy_split(s, 0.2, p);
    CHECK(e.left == doctest::Approx(e.right).epsilon(1e-14));

    // energy placed strictly to the left stays on the left
    FieldState l = blank(21);
    l.pi[3] = 1.0;
    const EnergySplit el = string_energy_split(l, 0.2, p);
    CHECK(el.right == 0.0);
    CHECK(el.left > 0.0);
}
