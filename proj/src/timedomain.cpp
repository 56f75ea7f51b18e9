#include "springstring/timedomain.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <ostream>

#include <fftw3.h>

#include "springstring/csv.hpp"
#include "springstring/model.hpp"
#include "springstring/spectral.hpp"

namespace springstring {

void validate(const GridSpec& grid)
{
    if (grid.n_nodes < 3 || grid.n_nodes % 2 == 0)
        throw InvalidArgument("grid: n_nodes must be odd and >= 3");
    if (!std::isfinite(grid.dx) || !(grid.dx > 0.0))
        throw InvalidArgument("grid: dx must be finite and > 0");
    if (!std::isfinite(grid.dt) || !(grid.dt > 0.0))
        throw InvalidArgument("grid: dt must be finite and > 0");
    if (grid.dt > 0.5 * grid.dx)
        throw CflError("grid: dt must not exceed dx/2");
    if (const auto* s = std::get_if<Sponge>(&grid.boundary)) {
        if (!std::isfinite(s->width) || s->width < 10.0 * grid.dx)
            throw InvalidArgument("grid: sponge width must be at least 10 dx");
        if (!std::isfinite(s->strength) || s->strength < 0.0)
            throw InvalidArgument("grid: sponge strength must be finite and >= 0");
        if (2.0 * s->width >= grid.length())
            throw InvalidArgument("grid: sponge layers overlap");
    }
}

FieldState zero_state(const GridSpec& grid)
{
    validate(grid);
    FieldState s;
    s.xi.assign(grid.n_nodes, 0.0);
    s.pi.assign(grid.n_nodes, 0.0);
    return s;
}

namespace {

void check_compatible(const FieldState& s, const GridSpec& grid)
{
    if (s.xi.size() != grid.n_nodes || s.pi.size() != grid.n_nodes)
        throw InvalidArgument("field state does not match the grid");
}

// π += h·(string force), P += h·(oscillator force)
void kick(FieldState& s, const GridSpec& grid, const ModelParams& p, double h)
{
    const std::size_t n = grid.n_nodes;
    const std::size_t c = grid.center();
    const double inv_dx2 = 1.0 / (grid.dx * grid.dx);
    const double w2 = p.mass_gap * p.mass_gap;
    const double* xi = s.xi.data();
    double* pi = s.pi.data();
    for (std::size_t i = 1; i + 1 < n; ++i)
        pi[i] += h * ((xi[i + 1] - 2.0 * xi[i] + xi[i - 1]) * inv_dx2 - w2 * xi[i]);
    const double stretch = xi[c] - s.x_osc;
    pi[c] -= h * p.kappa / grid.dx * stretch;
    const double W0 = p.bare_frequency;
    s.p_osc += h * (-W0 * W0 * s.x_osc + p.kappa * stretch);
}

void drift(FieldState& s, const GridSpec& grid, double h)
{
    const std::size_t n = grid.n_nodes;
    for (std::size_t i = 1; i + 1 < n; ++i)
        s.xi[i] += h * s.pi[i];
    s.x_osc += h * s.p_osc;
}

void absorb(FieldState& s, const GridSpec& grid, const Sponge& sponge)
{
    const std::size_t n = grid.n_nodes;
    const std::size_t layer = std::min(n / 2, static_cast<std::size_t>(std::ceil(sponge.width / grid.dx)));
    for (std::size_t j = 0; j < layer; ++j) {
        // depth into the layer, 0 at its inner edge and `width` at the wall
        const double depth = sponge.width - static_cast<double>(j) * grid.dx;
        if (depth <= 0.0)
            continue;
        const double r = std::sin(0.5 * kPi * depth / sponge.width);
        const double f = std::exp(-sponge.strength * r * r * grid.dt);
        for (std::size_t i : {j, n - 1 - j}) {
            s.xi[i] *= f;
            s.pi[i] *= f;
        }
    }
}

void step_in_place(FieldState& s, const GridSpec& grid, const ModelParams& p)
{
    const double dt = grid.dt;
    kick(s, grid, p, 0.5 * dt);
    drift(s, grid, dt);
    kick(s, grid, p, 0.5 * dt);
    if (const auto* sponge = std::get_if<Sponge>(&grid.boundary))
        absorb(s, grid, *sponge);
    s.t += dt;
}

// String energy of nodes with |x| < radius, plus the bonds between them.
double local_string_energy(const FieldState& s, const GridSpec& grid, const ModelParams& p, double radius)
{
    const double dx = grid.dx;
    const double w2 = p.mass_gap * p.mass_gap;
    double e = 0.0;
    for (std::size_t i = 0; i < grid.n_nodes; ++i) {
        if (std::abs(grid.position(i)) >= radius)
            continue;
        e += 0.5 * (s.pi[i] * s.pi[i] + w2 * s.xi[i] * s.xi[i]) * dx;
        if (i + 1 < grid.n_nodes) {
            const double g = (s.xi[i + 1] - s.xi[i]) / dx;
            e += 0.5 * g * g * dx;
        }
    }
    return e;
}

std::size_t steps_for(double duration, double dt)
{
    return static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
}

} // namespace

FieldState step(const FieldState& state, const GridSpec& grid, const ModelParams& p)
{
    FieldState next = state;
    advance(next, grid, p, 1);
    return next;
}

void advance(FieldState& state, const GridSpec& grid, const ModelParams& p, std::size_t n_steps)
{
    validate(grid);
    validate(p);
    check_compatible(state, grid);
    for (std::size_t i = 0; i < n_steps; ++i)
        step_in_place(state, grid, p);
}

TimeSeries run(FieldState& state, double duration, const GridSpec& grid, const ModelParams& p,
               const RecordOptions& rec)
{
    validate(grid);
    validate(p);
    check_compatible(state, grid);
    if (!std::isfinite(duration) || !(duration > 0.0))
        throw InvalidArgument("duration must be finite and > 0");
    if (rec.stride == 0)
        throw InvalidArgument("record stride must be >= 1");
    for (std::size_t node : rec.probe_nodes)
        if (node >= grid.n_nodes)
            throw InvalidArgument("probe node outside the grid");

    TimeSeries ts;
    ts.dx = grid.dx;
    ts.probe_nodes = rec.probe_nodes;
    ts.probes.resize(rec.probe_nodes.size());
    auto record = [&] {
        ts.times.push_back(state.t);
        ts.x_osc.push_back(state.x_osc);
        ts.p_osc.push_back(state.p_osc);
        ts.e_osc.push_back(oscillator_energy(state, p));
        ts.e_total.push_back(total_energy(state, grid.dx, p));
        for (std::size_t j = 0; j < rec.probe_nodes.size(); ++j)
            ts.probes[j].push_back(state.xi[rec.probe_nodes[j]]);
    };

    const std::size_t n = steps_for(duration, grid.dt);
    record();
    for (std::size_t i = 1; i <= n; ++i) {
        step_in_place(state, grid, p);
        if (i % rec.stride == 0)
            record();
    }
    for (double v : ts.e_total)
        if (!std::isfinite(v))
            throw NumericalError("simulation produced non-finite energy");
    return ts;
}

void write_timeseries_csv(std::ostream& os, const TimeSeries& s)
{
    os << "t,x_osc,p_osc,e_osc,e_total";
    for (std::size_t node : s.probe_nodes)
        os << ",probe_" << node;
    os << '\n';
    std::vector<double> row;
    for (std::size_t i = 0; i < s.size(); ++i) {
        row = {s.times[i], s.x_osc[i], s.p_osc[i], s.e_osc[i], s.e_total[i]};
        for (const auto& probe : s.probes)
            row.push_back(probe[i]);
        write_csv_row(os, row);
    }
}

void write_snapshot_csv(std::ostream& os, const FieldState& state, const GridSpec& grid)
{
    check_compatible(state, grid);
    os << "x,xi,pi\n";
    for (std::size_t i = 0; i < grid.n_nodes; ++i)
        write_csv_row(os, {grid.position(i), state.xi[i], state.pi[i]});
}

TimeSeries simulate_radiation(const ModelParams& p, double x0, double duration, const GridSpec& grid,
                              const RecordOptions& rec)
{
    validate(grid);
    if (!std::isfinite(x0))
        throw InvalidArgument("x0 must be finite");
    if (!grid.has_sponge() && duration > grid.length())
        throw InvalidArgument("duration exceeds the recurrence time of the closed string; "
                              "use a longer grid or a sponge boundary");
    FieldState s = zero_state(grid);
    s.x_osc = x0;
    return run(s, duration, grid, p, rec);
}

DecayFit fit_decay_rate(const TimeSeries& series, double skip_fraction)
{
    if (!(skip_fraction >= 0.0 && skip_fraction < 1.0))
        throw InvalidArgument("skip fraction must lie in [0, 1)");
    const auto& e = series.e_osc;
    const auto& t = series.times;
    const std::size_t first = std::max<std::size_t>(1, static_cast<std::size_t>(skip_fraction * e.size()));

    std::vector<double> tm;
    std::vector<double> le;
    for (std::size_t i = first; i + 1 < e.size(); ++i) {
        if (e[i] > e[i - 1] && e[i] >= e[i + 1] && e[i] > 0.0) {
            tm.push_back(t[i]);
            le.push_back(std::log(e[i]));
        }
    }
    if (tm.size() < 5 && series.x_osc.size() == e.size()) {
        // When the energy loss per period outweighs its ripple, E_osc falls as a
        // staircase with no interior maxima. Sample it once per period instead,
        // at the upward zero crossings of X, which fixes the phase just as well.
        tm.clear();
        le.clear();
        const auto& x = series.x_osc;
        for (std::size_t i = first; i < x.size(); ++i) {
            if (x[i - 1] < 0.0 && x[i] >= 0.0) {
                const double f = -x[i - 1] / (x[i] - x[i - 1]);
                const double ei = e[i - 1] + f * (e[i] - e[i - 1]);
                if (ei > 0.0) {
                    tm.push_back(t[i - 1] + f * (t[i] - t[i - 1]));
                    le.push_back(std::log(ei));
                }
            }
        }
    }
    if (tm.size() < 5)
        throw InvalidArgument("fit_decay_rate: fewer than 5 energy maxima after the transient");

    const double n = static_cast<double>(tm.size());
    double st = 0, sl = 0;
    for (std::size_t i = 0; i < tm.size(); ++i) {
        st += tm[i];
        sl += le[i];
    }
    const double mt = st / n, ml = sl / n;
    double stt = 0, stl = 0, sll = 0;
    for (std::size_t i = 0; i < tm.size(); ++i) {
        stt += (tm[i] - mt) * (tm[i] - mt);
        stl += (tm[i] - mt) * (le[i] - ml);
        sll += (le[i] - ml) * (le[i] - ml);
    }
    DecayFit fit;
    fit.n_maxima = tm.size();
    const double slope = stl / stt;
    fit.gamma = -slope;
    fit.r_squared = sll > 0.0 ? (stl * stl) / (stt * sll) : 1.0;
    fit.decaying = fit.gamma >= 1e-4;
    return fit;
}

GridSpec sponge_grid(double half_length, double sponge_width, double dx)
{
    if (!(half_length > 0.0) || !(dx > 0.0))
        throw InvalidArgument("sponge_grid: half length and dx must be > 0");
    GridSpec g;
    g.n_nodes = 2 * static_cast<std::size_t>(std::llround(half_length / dx)) + 1;
    g.dx = dx;
    g.dt = 0.5 * dx;
    g.boundary = Sponge{sponge_width, 1.0};
    validate(g);
    return g;
}

GridSpec wavepacket_grid(const ModelParams& p, double k0, double sigma_x, double dx)
{
    validate(p);
    if (!(k0 > 0.0) || !(sigma_x > 0.0) || !(dx > 0.0))
        throw InvalidArgument("wavepacket_grid: k0, sigma_x and dx must be > 0");
    const double omega = dispersion_omega(k0, p);
    const double vg = k0 / omega;
    // the packet needs about 12σ/v_g to clear the origin; nothing may come
    // back from the walls (at speed < 1) before then
    const double clear_time = 12.0 * sigma_x / vg + 40.0;
    const double half = std::max(12.0 * sigma_x + 10.0, 0.6 * clear_time + 10.0);
    GridSpec g;
    g.n_nodes = 2 * static_cast<std::size_t>(std::ceil(half / dx)) + 1;
    g.dx = dx;
    g.dt = 0.5 * dx;
    g.boundary = Dirichlet{};
    validate(g);
    return g;
}

WavepacketResult simulate_wavepacket(const ModelParams& p, double k0, double sigma_x, const GridSpec& grid)
{
    validate(p);
    validate(grid);
    if (!std::isfinite(k0) || !(k0 > 0.0))
        throw InvalidArgument("simulate_wavepacket: k0 must be > 0");
    if (!std::isfinite(sigma_x) || sigma_x < 10.0 / k0)
        throw InvalidArgument("simulate_wavepacket: sigma_x must be at least 10/k0");

    const double omega = dispersion_omega(k0, p);
    const double vg = k0 / omega;
    const double xc = -6.0 * sigma_x;
    if (xc - 6.0 * sigma_x < -0.5 * grid.length())
        throw InvalidArgument("simulate_wavepacket: packet does not fit on the grid");

    FieldState s = zero_state(grid);
    for (std::size_t i = 1; i + 1 < grid.n_nodes; ++i) {
        const double u = grid.position(i) - xc;
        const double env = std::exp(-0.5 * u * u / (sigma_x * sigma_x));
        const double denv = -u / (sigma_x * sigma_x) * env;
        const double ph = k0 * u;
        s.xi[i] = env * std::cos(ph);
        // right-moving: ξ̇ = ω·env·sin φ − v_g·env'·cos φ
        s.pi[i] = omega * env * std::sin(ph) - vg * denv * std::cos(ph);
    }

    const double e0 = total_energy(s, grid.dx, p);
    const double arrival = -xc / vg;
    const double t_max = grid.length(); // fastest signal returns from a wall after ℓ
    const std::size_t chunk = 100;
    bool cleared = false;
    while (s.t < t_max) {
        advance(s, grid, p, chunk);
        if (s.t < arrival)
            continue;
        const double near = local_string_energy(s, grid, p, 2.0 * sigma_x) + oscillator_energy(s, p);
        if (near < 1e-5 * e0) {
            cleared = true;
            break;
        }
    }
    if (!cleared)
        throw NumericalError("simulate_wavepacket: packet did not clear the origin before wall reflections returned");

    const EnergySplit split = string_energy_split(s, grid.dx, p);
    WavepacketResult r;
    r.reflected_fraction = split.left / e0;
    r.transmitted_fraction = split.right / e0;
    r.oscillator_fraction = oscillator_energy(s, p) / e0;
    r.energy_balance = r.reflected_fraction + r.transmitted_fraction + r.oscillator_fraction;
    r.stop_time = s.t;
    r.launch_position = xc;
    return r;
}

FieldState bound_mode_state(const ModelParams& p, const GridSpec& grid, double amplitude)
{
    const auto b = bound_mode(p);
    if (!b)
        throw InvalidArgument("bound_mode_state: no bound mode for these parameters");
    FieldState s = zero_state(grid);
    for (std::size_t i = 1; i + 1 < grid.n_nodes; ++i)
        s.xi[i] = amplitude * b->c_b * std::exp(-std::abs(grid.position(i)) / b->decay_length);
    s.x_osc = amplitude * b->x_amplitude;
    return s;
}

FieldState cavity_kick_state(const GridSpec& grid, double x0, double bump_amplitude, double offset,
                             double bump_width)
{
    if (!(bump_width > 0.0))
        throw InvalidArgument("cavity_kick_state: bump width must be > 0");
    FieldState s = zero_state(grid);
    for (std::size_t i = 1; i + 1 < grid.n_nodes; ++i) {
        const double u = (grid.position(i) - offset) / bump_width;
        s.xi[i] = bump_amplitude * std::exp(-0.5 * u * u);
    }
    s.x_osc = x0;
    return s;
}

namespace {
std::mutex fftw_planner_mutex; // FFTW planning is not thread-safe
}

std::vector<SpectralPeak> spectrum_peaks(const std::vector<double>& samples, double dt, double threshold)
{
    const std::size_t n = samples.size();
    if (n < 4096)
        throw InvalidArgument("spectrum: at least 4096 samples are required");
    if (!(dt > 0.0))
        throw InvalidArgument("spectrum: dt must be > 0");

    std::size_t m = 1;
    while (m < 4 * n)
        m <<= 1;

    double mean = 0.0;
    for (double v : samples)
        mean += v;
    mean /= static_cast<double>(n);

    double* in = fftw_alloc_real(m);
    fftw_complex* out = fftw_alloc_complex(m / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex);
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(m), in, out, FFTW_ESTIMATE);
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (i < n) {
            const double w = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n - 1)));
            in[i] = w * (samples[i] - mean);
        } else {
            in[i] = 0.0;
        }
    }
    fftw_execute(plan);
    std::vector<double> mag(m / 2 + 1);
    for (std::size_t j = 0; j < mag.size(); ++j)
        mag[j] = std::hypot(out[j][0], out[j][1]);
    {
        std::lock_guard lock(fftw_planner_mutex);
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);

    const double peak = *std::max_element(mag.begin(), mag.end());
    const double df = 2.0 * kPi / (static_cast<double>(m) * dt);
    std::vector<SpectralPeak> peaks;
    for (std::size_t j = 1; j + 1 < mag.size(); ++j) {
        if (!(mag[j] > mag[j - 1] && mag[j] >= mag[j + 1] && mag[j] >= threshold * peak))
            continue;
        // parabola through the three log magnitudes around the maximum
        const double a = std::log(mag[j - 1]), b = std::log(mag[j]), c = std::log(mag[j + 1]);
        const double denom = a - 2.0 * b + c;
        const double offset = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
        peaks.push_back({(static_cast<double>(j) + offset) * df, mag[j] / peak});
    }
    return peaks;
}

std::vector<SpectralPeak> spectrum_from_timeseries(const TimeSeries& series, double threshold,
                                                   std::optional<std::size_t> probe)
{
    if (series.size() < 2)
        throw InvalidArgument("spectrum: series too short");
    const double dt = (series.times.back() - series.times.front()) / static_cast<double>(series.size() - 1);
    if (probe) {
        if (*probe >= series.probes.size())
            throw InvalidArgument("spectrum: no such probe");
        return spectrum_peaks(series.probes[*probe], dt, threshold);
    }
    return spectrum_peaks(series.x_osc, dt, threshold);
}

double bin_width(const TimeSeries& series)
{
    if (series.size() < 2)
        throw InvalidArgument("bin_width: series too short");
    return 2.0 * kPi / (series.times.back() - series.times.front());
}

} // namespace springstring
