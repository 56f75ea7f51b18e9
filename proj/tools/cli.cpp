#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "springstring/cavity.hpp"
#include "springstring/csv.hpp"
#include "springstring/model.hpp"
#include "springstring/modes.hpp"
#include "springstring/scattering.hpp"
#include "springstring/spectral.hpp"
#include "springstring/timedomain.hpp"

namespace springstring::cli {

namespace {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n = 0;
};

// "lo:hi:n"
Range parse_range(const std::string& text)
{
    Range r;
    std::istringstream is(text);
    char c1 = 0, c2 = 0;
    long long n = 0;
    if (!(is >> r.lo >> c1 >> r.hi >> c2 >> n) || c1 != ':' || c2 != ':' || !is.eof() || n < 2)
        throw InvalidArgument("range must look like lo:hi:n with n >= 2, got '" + text + "'");
    r.n = static_cast<std::size_t>(n);
    return r;
}

// Writes key=value lines.
class Summary {
public:
    explicit Summary(std::ostream& os) : os_(os) {}

    Summary& operator()(const std::string& key, double v)
    {
        os_ << key << '=' << fmt17(v) << '\n';
        return *this;
    }
    Summary& operator()(const std::string& key, const std::string& v)
    {
        os_ << key << '=' << v << '\n';
        return *this;
    }
    Summary& operator()(const std::string& key, const char* v) { return (*this)(key, std::string(v)); }
    Summary& operator()(const std::string& key, std::size_t v)
    {
        os_ << key << '=' << v << '\n';
        return *this;
    }
    Summary& operator()(const std::string& key, int v)
    {
        os_ << key << '=' << v << '\n';
        return *this;
    }
    Summary& operator()(const std::string& key, bool v) { return (*this)(key, v ? "true" : "false"); }

private:
    std::ostream& os_;
};

// Opens `path` for writing, or returns nullptr for an empty path.
std::unique_ptr<std::ofstream> open_output(const std::string& path)
{
    if (path.empty())
        return nullptr;
    auto f = std::make_unique<std::ofstream>(path);
    if (!*f)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    return f;
}

void finish(std::ofstream* f, const std::string& path)
{
    if (f) {
        f->flush();
        if (!*f)
            throw std::runtime_error("failed writing '" + path + "'");
    }
}

struct Options {
    ModelParams p{.kappa = 0.5, .mass_gap = 0.3, .bare_frequency = 1.0};
    std::uint64_t seed = 12345;

    // scatter
    std::string omega_range = "0.31:5:2000";
    std::string out;

    // simulate
    double dx = 0.02;
    double dt = 0.0; // 0: dx/2
    std::size_t stride = 5;
    double duration = 0.0; // 0: scenario default
    double half_length = 80.0;
    double sponge_width = 25.0;
    double sponge_strength = 1.0;
    std::string boundary = "sponge";
    double x0 = 1.0;
    double k0 = 0.0;
    double centre_omega = 0.0;
    double sigma = 0.0;
    double threshold = 0.04;
    double bump = 0.5;
    double bump_width = 0.1;
    std::optional<double> offset;
    std::string snapshot;

    // cavity
    double length = 20.0;
    int n_max = 12;
    double count_hi = 0.0; // 0: Ωκ + (Ωκ − Ω₀)·3
    std::string curves;
    double curves_omega_max = 3.0;
    std::size_t curves_n = 2000;

    // identities
    std::size_t samples = 1000;
};

GridSpec make_grid(const Options& o, bool sponge_default)
{
    GridSpec g;
    g.dx = o.dx;
    g.dt = o.dt > 0.0 ? o.dt : 0.5 * o.dx;
    if (!(o.dx > 0.0) || !(o.half_length > 0.0))
        throw InvalidArgument("dx and half-length must be > 0");
    g.n_nodes = 2 * static_cast<std::size_t>(std::llround(o.half_length / o.dx)) + 1;
    const bool sponge = o.boundary == "sponge" ? true : o.boundary == "dirichlet" ? false : sponge_default;
    if (o.boundary != "sponge" && o.boundary != "dirichlet")
        throw InvalidArgument("boundary must be 'sponge' or 'dirichlet'");
    if (sponge)
        g.boundary = Sponge{o.sponge_width, o.sponge_strength};
    validate(g);
    return g;
}

double exact_gamma(const ModelParams& p)
{
    return p.mass_gap == 0.0 ? dalembert_poles(p).gamma : kg_poles(p).gamma;
}

// ---------------------------------------------------------------- scatter

void cmd_scatter(const Options& o, std::ostream& out, std::ostream& err)
{
    validate(o.p);
    const Range r = parse_range(o.omega_range);
    const auto rows = sweep(r.lo, r.hi, r.n, o.p);

    auto file = open_output(o.out);
    std::ostream& csv = file ? *file : out;
    write_sweep_csv(csv, rows);
    finish(file.get(), o.out);

    // with the table on stdout the summary moves to stderr
    Summary s(file ? out : err);
    double worst = 0.0;
    std::size_t shifted = 0;
    for (const auto& row : rows) {
        worst = std::max(worst, std::abs(std::norm(row.c.rho) + std::norm(row.c.tau) - 1.0));
        shifted += row.shifted ? 1 : 0;
    }
    s("rows", rows.size())("Omega_kappa", shifted_frequency(o.p))("max_unitarity_residual", worst);
    if (shifted)
        s("shifted_points", shifted);
    if (o.p.kappa == 0.0 || shifted_frequency(o.p) <= o.p.mass_gap) {
        s("resonance", "none");
        return;
    }
    try {
        const auto q = resonance_quality(o.p);
        s("resonance", "present")("q_numeric", q.q_numeric)("q_perturbative", q.q_perturbative);
        s("omega_half_low", q.omega_low)("omega_half_high", q.omega_high);
    } catch (const BracketError& e) {
        s("resonance", "unbracketed");
    }
}

// ------------------------------------------------------------------ poles

void print_complex(Summary& s, const std::string& key, Complex z)
{
    s(key + "_re", z.real())(key + "_im", z.imag());
}

void cmd_poles(const Options& o, std::ostream& out)
{
    validate(o.p);
    Summary s(out);
    const bool dalembert = o.p.mass_gap == 0.0;
    const PoleSet ps = dalembert ? dalembert_poles(o.p) : kg_poles(o.p);
    s("string", dalembert ? "dalembert" : "klein_gordon");
    s("uncoupled", ps.uncoupled);
    const char* names[3] = {"root0", "root_plus", "root_minus"};
    for (std::size_t i = 0; i < 3; ++i) {
        print_complex(s, names[i], ps.roots[i]);
        print_complex(s, std::string(names[i]) + "_omega", ps.frequencies[i]);
        s(std::string(names[i]) + "_physical", ps.physical[i]);
    }
    s("gamma", ps.gamma);

    std::optional<PerturbativePoles> pert;
    if (dalembert)
        pert = perturbative_dalembert(o.p);
    else if (o.p.mass_gap < o.p.bare_frequency)
        pert = perturbative_kg(o.p);
    if (pert) {
        print_complex(s, "pert_root0", pert->root0);
        print_complex(s, "pert_root_plus", pert->root_plus);
        s("pert_gamma", pert->gamma);
        s("diff_root0", std::abs(pert->root0 - ps.roots[0]));
        s("diff_root_plus", std::abs(pert->root_plus - ps.roots[1]));
    }

    if (const auto b = bound_mode(o.p)) {
        s("bound_mode", "present")("omega_b", b->omega_b)("u_b", b->u_b)("C_b", b->c_b);
        s("decay_length", b->decay_length)("X_b", b->x_amplitude);
        s("u_cubic_residual", std::abs(u_cubic(b->u_b, o.p)));
        s("omega_b_perturbative", perturbative_bound_frequency(o.p));
    } else {
        s("bound_mode", "absent");
    }
}

// --------------------------------------------------------------- simulate

void write_series(const Options& o, const TimeSeries& ts)
{
    auto file = open_output(o.out);
    if (file) {
        write_timeseries_csv(*file, ts);
        finish(file.get(), o.out);
    }
}

void write_snapshot(const Options& o, const FieldState& st, const GridSpec& g)
{
    auto file = open_output(o.snapshot);
    if (file) {
        write_snapshot_csv(*file, st, g);
        finish(file.get(), o.snapshot);
    }
}

void sim_radiation(const Options& o, std::ostream& out)
{
    validate(o.p);
    const GridSpec g = make_grid(o, true);
    const double duration = o.duration > 0.0 ? o.duration : 300.0;
    const TimeSeries ts = simulate_radiation(o.p, o.x0, duration, g, {.stride = o.stride, .probe_nodes = {}});
    write_series(o, ts);
    const DecayFit fit = fit_decay_rate(ts);
    const double exact = exact_gamma(o.p);
    Summary s(out);
    s("gamma_fdtd", fit.gamma)("gamma_exact", exact);
    s("rel_err", exact > 0.0 ? std::abs(fit.gamma / exact - 1.0) : std::numeric_limits<double>::quiet_NaN());
    s("r_squared", fit.r_squared)("n_maxima", fit.n_maxima)("decaying", fit.decaying);
}

void sim_wavepacket(const Options& o, std::ostream& out)
{
    validate(o.p);
    double k0 = o.k0;
    if (o.centre_omega > 0.0) {
        if (!(o.centre_omega > o.p.mass_gap))
            throw InvalidArgument("--omega must exceed omega0");
        k0 = dispersion_k(o.centre_omega, o.p).real();
    }
    if (!(k0 > 0.0))
        throw InvalidArgument("give --k0 > 0 or --omega > omega0");
    const double sigma = o.sigma > 0.0 ? o.sigma : 20.0 / k0;
    const GridSpec g = wavepacket_grid(o.p, k0, sigma, o.dx);
    const WavepacketResult r = simulate_wavepacket(o.p, k0, sigma, g);
    const double omega = dispersion_omega(k0, o.p);
    Summary s(out);
    s("k0", k0)("omega", omega)("sigma_x", sigma);
    s("reflected", r.reflected_fraction)("transmitted", r.transmitted_fraction);
    s("oscillator", r.oscillator_fraction)("energy_balance", r.energy_balance);
    double rho2;
    if (omega == shifted_frequency(o.p))
        rho2 = 1.0;
    else
        rho2 = std::norm(coefficients(omega, o.p).rho);
    s("rho2_expected", rho2)("abs_err", std::abs(r.reflected_fraction - rho2))("stop_time", r.stop_time);
}

void sim_bound(const Options& o, std::ostream& out)
{
    validate(o.p);
    const auto b = bound_mode(o.p);
    if (!b)
        throw InvalidArgument("no bound mode: requires omega0 > Omega0 and kappa > 0");
    const GridSpec g = make_grid(o, true);
    FieldState st = bound_mode_state(o.p, g);
    const double e0 = total_energy(st, g.dx, o.p);
    const double duration = o.duration > 0.0 ? o.duration : 500.0;
    const TimeSeries ts = run(st, duration, g, o.p, {.stride = o.stride, .probe_nodes = {}});
    write_series(o, ts);
    write_snapshot(o, st, g);
    const DecayFit fit = fit_decay_rate(ts);
    const auto peaks = spectrum_from_timeseries(ts, 0.1);
    Summary s(out);
    s("omega_b", b->omega_b)("energy_loss", 1.0 - ts.e_total.back() / e0);
    s("gamma_fdtd", fit.gamma)("decaying", fit.decaying)("bin_width", bin_width(ts));
    if (!peaks.empty()) {
        const auto top = std::max_element(peaks.begin(), peaks.end(),
                                          [](const auto& a, const auto& c) { return a.amplitude < c.amplitude; });
        s("fft_peak", top->frequency)("peak_offset_bins", std::abs(top->frequency - b->omega_b) / bin_width(ts));
    }
}

void sim_cavity(const Options& o, std::ostream& out)
{
    validate(o.p);
    if (!(o.length > 0.0) || !(o.dx > 0.0))
        throw InvalidArgument("length and dx must be > 0");
    GridSpec g;
    g.dx = o.dx;
    g.dt = o.dt > 0.0 ? o.dt : 0.5 * o.dx;
    g.n_nodes = 2 * static_cast<std::size_t>(std::llround(0.5 * o.length / o.dx)) + 1;
    g.boundary = Dirichlet{};
    validate(g);

    const double offset = o.offset.value_or(o.length / 7.0);
    FieldState st = cavity_kick_state(g, o.x0, o.bump, offset, o.bump_width);
    // the probe sits off both the centre and the bump so it hears both parities
    const std::size_t probe = g.center() + static_cast<std::size_t>(std::llround(0.37 * offset / g.dx));
    const double duration = o.duration > 0.0 ? o.duration : 2000.0;
    const TimeSeries ts = run(st, duration, g, o.p, {.stride = o.stride, .probe_nodes = {probe}});
    write_series(o, ts);

    const double bin = bin_width(ts);
    const double ell = g.length();
    const EvenSpectrum even = even_spectrum(ell, o.n_max, o.p);
    const auto odd = odd_spectrum(ell, o.n_max);
    const double w_top = even.levels.empty() ? 0.0 : even.levels.back().omega;

    Summary s(out);
    s("length", ell)("bin_width", bin);
    auto report = [&](const char* label, const std::vector<SpectralPeak>& peaks) {
        for (const auto& pk : peaks) {
            if (pk.frequency > w_top)
                continue;
            double best = std::numeric_limits<double>::infinity();
            const char* family = "even";
            for (const auto& l : even.levels)
                if (std::abs(l.omega - pk.frequency) < best) {
                    best = std::abs(l.omega - pk.frequency);
                    family = "even";
                }
            for (double k : odd) {
                const double w = dispersion_omega(k, o.p);
                if (std::abs(w - pk.frequency) < best) {
                    best = std::abs(w - pk.frequency);
                    family = "odd";
                }
            }
            out << "peak source=" << label << " omega=" << fmt17(pk.frequency) << " amplitude="
                << fmt17(pk.amplitude) << " nearest=" << family << " offset_bins=" << fmt17(best / bin) << '\n';
        }
    };
    report("oscillator", spectrum_from_timeseries(ts, o.threshold));
    report("probe", spectrum_from_timeseries(ts, o.threshold, 0));
}

// ----------------------------------------------------------------- cavity

void cmd_cavity(const Options& o, std::ostream& out, std::ostream& err)
{
    validate(o.p);
    const EvenSpectrum even = even_spectrum(o.length, o.n_max, o.p);
    const auto odd = odd_spectrum(o.length, o.n_max);
    const auto free_w = free_spectrum(o.length, o.n_max, o.p);

    auto file = open_output(o.out);
    write_cavity_csv(file ? *file : out, even, odd, free_w, o.length, o.p);
    finish(file.get(), o.out);

    if (!o.curves.empty()) {
        auto cf = open_output(o.curves);
        write_graphical_csv(*cf, o.length, o.curves_omega_max, o.curves_n, o.p);
        finish(cf.get(), o.curves);
    }

    Summary s(file ? out : err);
    double worst = 0.0;
    for (const auto& l : even.levels)
        worst = std::max(worst, l.residual);
    s("even_levels", even.levels.size())("max_residual", worst);
    s("missing_branches", even.missing_branches.size());
    const double W0 = o.p.bare_frequency;
    const double Wk = shifted_frequency(o.p);
    const double hi = o.count_hi > 0.0 ? o.count_hi : Wk + 3.0 * (Wk - W0) + 0.5;
    // only count where both lists are complete
    const double cap = std::min(hi, free_w.back());
    const double lo = std::max(W0, o.p.mass_gap);
    const int n_int = count_levels(level_frequencies(even), lo, cap);
    const int n_free = count_levels(free_w, lo, cap);
    s("count_lo", lo)("count_hi", cap)("interacting_count", n_int)("free_count", n_free);
    s("extra_levels", n_int - n_free);
}

// ------------------------------------------------------------- identities

int cmd_identities(const Options& o, std::ostream& out)
{
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst_id = 0.0, worst_pv = 0.0, worst_r = 0.0;
    for (std::size_t i = 0; i < o.samples; ++i) {
        const ModelParams p{.kappa = 2.0 * U(rng), .mass_gap = U(rng), .bare_frequency = 0.2 + 2.0 * U(rng)};
        const double omega = p.mass_gap + 0.01 + 4.0 * U(rng);
        worst_id = std::max(worst_id, check_coefficient_identities(omega, p).max());
        const Matrix2 r = r_matrix(omega, p);
        worst_r = std::max(worst_r, distance_from_identity(r * r.adjoint()));
        const double k1 = 0.05 + 3.0 * U(rng);
        const double k2 = 0.05 + 3.0 * U(rng);
        if (k1 != k2)
            worst_pv = std::max(worst_pv, check_pv_identity(k1, k2, p));
    }
    Summary s(out);
    s("samples", o.samples)("seed", std::to_string(o.seed));
    s("max_coefficient_residual", worst_id)("max_r_unitarity", worst_r)("max_pv_residual", worst_pv);
    const bool ok = worst_id <= 1e-10 && worst_r <= 1e-12 && worst_pv <= 1e-10;
    s("status", ok ? "pass" : "fail");
    return ok ? kOk : kRuntimeError;
}

void add_grid_options(CLI::App* c, Options& o)
{
    c->add_option("--dx", o.dx, "Grid spacing")->capture_default_str();
    c->add_option("--dt", o.dt, "Time step (default dx/2; must not exceed dx/2)");
    c->add_option("--stride", o.stride, "Record every n-th step")->capture_default_str();
    c->add_option("--duration", o.duration, "Simulated time (scenario default when omitted)");
    c->add_option("--out", o.out, "Time-series CSV path");
}

void add_open_grid_options(CLI::App* c, Options& o)
{
    c->add_option("--half-length", o.half_length, "Half the string length, sponge included")->capture_default_str();
    c->add_option("--sponge-width", o.sponge_width, "Absorbing layer width")->capture_default_str();
    c->add_option("--sponge-strength", o.sponge_strength, "Absorbing layer damping rate")->capture_default_str();
    c->add_option("--boundary", o.boundary, "sponge or dirichlet")->capture_default_str();
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Oscillator coupled to an infinite or clamped string: scattering, poles, time-domain runs, "
                 "cavity spectra"};
    app.name("springstring");
    app.set_config("--config", "", "key = value file; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--kappa", o.p.kappa, "Coupling stiffness kappa >= 0")->capture_default_str();
    app.add_option("--omega0", o.p.mass_gap, "String mass gap omega0 >= 0")->capture_default_str();
    app.add_option("--Omega0", o.p.bare_frequency, "Bare oscillator frequency Omega0 > 0")->capture_default_str();
    app.add_option("--seed", o.seed, "Seed for randomized sampling")->capture_default_str();

    auto* scatter = app.add_subcommand("scatter", "Sweep rho, tau, eta, chi over a frequency range");
    scatter->add_option("--omega", o.omega_range, "lo:hi:n, all frequencies above omega0")->capture_default_str();
    scatter->add_option("--out", o.out, "CSV path (stdout when omitted; the summary then goes to stderr)");

    auto* poles = app.add_subcommand("poles", "Characteristic roots, decay rate and bound mode");

    auto* simulate = app.add_subcommand("simulate", "Finite-difference time-domain scenarios");
    simulate->require_subcommand(1);
    auto* radiation = simulate->add_subcommand("radiation", "Free decay of a displaced oscillator");
    add_grid_options(radiation, o);
    add_open_grid_options(radiation, o);
    radiation->add_option("--x0", o.x0, "Initial oscillator displacement")->capture_default_str();

    auto* packet = simulate->add_subcommand("wavepacket", "Gaussian packet scattering off the oscillator");
    packet->add_option("--dx", o.dx, "Grid spacing")->capture_default_str();
    packet->add_option("--k0", o.k0, "Carrier wavenumber");
    packet->add_option("--omega", o.centre_omega, "Carrier frequency (alternative to --k0)");
    packet->add_option("--sigma", o.sigma, "Envelope width (default 20/k0)");

    auto* cav = simulate->add_subcommand("cavity", "Kicked clamped string; FFT peaks against the level list");
    add_grid_options(cav, o);
    cav->add_option("--length", o.length, "String length")->capture_default_str();
    cav->add_option("--n-max", o.n_max, "Highest branch solved for comparison")->capture_default_str();
    cav->add_option("--x0", o.x0, "Initial oscillator displacement")->capture_default_str();
    cav->add_option("--bump", o.bump, "Amplitude of the off-centre string bump")->capture_default_str();
    cav->add_option("--bump-width", o.bump_width, "Width of the bump")->capture_default_str();
    cav->add_option("--offset", o.offset, "Bump centre (default length/7)");
    cav->add_option("--threshold", o.threshold, "Relative peak threshold")->capture_default_str();

    auto* bound = simulate->add_subcommand("bound", "Stability of the bound mode");
    add_grid_options(bound, o);
    add_open_grid_options(bound, o);
    bound->add_option("--snapshot", o.snapshot, "Final field CSV path");

    auto* cavity = app.add_subcommand("cavity", "Even, odd and free levels of a clamped string");
    cavity->add_option("--length", o.length, "String length")->capture_default_str();
    cavity->add_option("--n-max", o.n_max, "Highest branch")->capture_default_str();
    cavity->add_option("--out", o.out, "CSV path (stdout when omitted; the summary then goes to stderr)");
    cavity->add_option("--count-hi", o.count_hi, "Upper frequency for the level count");
    cavity->add_option("--curves", o.curves, "CSV path for the two graphical-solution curves");
    cavity->add_option("--curves-omega-max", o.curves_omega_max, "Upper frequency of the curves")
        ->capture_default_str();
    cavity->add_option("--curves-n", o.curves_n, "Samples along the curves")->capture_default_str();

    auto* identities = app.add_subcommand("identities", "Random-sample residuals of the mode identities");
    identities->add_option("--samples", o.samples, "Number of random samples")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    }

    try {
        if (*scatter)
            cmd_scatter(o, out, err);
        else if (*poles)
            cmd_poles(o, out);
        else if (*radiation)
            sim_radiation(o, out);
        else if (*packet)
            sim_wavepacket(o, out);
        else if (*cav)
            sim_cavity(o, out);
        else if (*bound)
            sim_bound(o, out);
        else if (*cavity)
            cmd_cavity(o, out, err);
        else if (*identities)
            return cmd_identities(o, out);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kOk;
}

} // namespace springstring::cli
