#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "springstring/field.hpp"
#include "springstring/types.hpp"

namespace springstring {

/// Advances one dt with velocity-Verlet leapfrog:
///   π̇ᵢ = (ξᵢ₊₁ − 2ξᵢ + ξᵢ₋₁)/dx² − ω₀²ξᵢ − [i = centre](κ/dx)(ξ₀ − X)
///   Ṗ  = −Ωκ²X + κξ₀
/// End nodes stay at zero. With a sponge, ξ and π are damped after the kick.
FieldState step(const FieldState& state, const GridSpec& grid, const ModelParams& p);

/// In-place version of step, repeated n times.
void advance(FieldState& state, const GridSpec& grid, const ModelParams& p, std::size_t n_steps = 1);

/// Recorded oscillator history. `probes[j][i]` is ξ at node probe_nodes[j] at times[i].
struct TimeSeries {
    double dx = 0.0;
    std::vector<double> times;
    std::vector<double> x_osc;
    std::vector<double> p_osc;
    std::vector<double> e_osc;
    std::vector<double> e_total;
    std::vector<std::size_t> probe_nodes;
    std::vector<std::vector<double>> probes;

    std::size_t size() const { return times.size(); }
};

struct RecordOptions {
    std::size_t stride = 1;                // record every `stride` steps
    std::vector<std::size_t> probe_nodes;  // extra ξ columns
};

/// Steps `state` until t ≥ duration (relative to its start) while recording.
TimeSeries run(FieldState& state, double duration, const GridSpec& grid, const ModelParams& p,
               const RecordOptions& rec = {});

/// t,x_osc,p_osc,e_osc,e_total[,probe_<node>...]
void write_timeseries_csv(std::ostream& os, const TimeSeries& series);

/// x,xi,pi
void write_snapshot_csv(std::ostream& os, const FieldState& state, const GridSpec& grid);

/// Free decay from X = x0, everything else at rest. On a Dirichlet grid the
/// duration may not exceed ℓ, the time for radiation to come back from the ends.
TimeSeries simulate_radiation(const ModelParams& p, double x0, double duration, const GridSpec& grid,
                              const RecordOptions& rec = {});

struct DecayFit {
    double gamma = 0.0;
    double r_squared = 0.0;
    std::size_t n_maxima = 0;
    bool decaying = true; // false when gamma < 1e-4
};

/// Log-linear least squares on the local maxima of e_osc after skipping the
/// leading `skip_fraction` of the samples. Needs at least 5 maxima; when the
/// energy decays as a staircase without interior maxima, one sample per period
/// is taken at the upward zero crossings of x_osc instead.
DecayFit fit_decay_rate(const TimeSeries& series, double skip_fraction = 0.1);

/// Sponge grid of half-width `half_length` (sponge included) at spacing dx,
/// dt = dx/2.
GridSpec sponge_grid(double half_length, double sponge_width, double dx);

struct WavepacketResult {
    double reflected_fraction = 0.0;
    double transmitted_fraction = 0.0;
    double oscillator_fraction = 0.0; // energy still held by the oscillator at the end
    double energy_balance = 0.0;      // (left + right + oscillator)/initial
    double stop_time = 0.0;
    double launch_position = 0.0;
};

/// Dirichlet grid wide enough to launch a packet of width sigma_x at −6σ and
/// let both outgoing parts clear the origin before anything returns.
GridSpec wavepacket_grid(const ModelParams& p, double k0, double sigma_x, double dx);

/// Gaussian packet ξ = e^{−(x−x_c)²/2σ²}cos(k₀(x − x_c)) launched rightwards
/// from x_c = −6σ. Runs until the energy within 2σ of the origin plus the
/// oscillator's has dropped below 1e−5 of the total, then splits the string
/// energy at x = 0.
WavepacketResult simulate_wavepacket(const ModelParams& p, double k0, double sigma_x, const GridSpec& grid);

/// Initial states for the stability and cavity runs.
FieldState bound_mode_state(const ModelParams& p, const GridSpec& grid, double amplitude = 1.0);
/// Oscillator displaced by x0 and a narrow bump centred off-axis at x = offset
/// (so both parities are excited); string momenta at rest.
FieldState cavity_kick_state(const GridSpec& grid, double x0, double bump_amplitude, double offset,
                             double bump_width);

struct SpectralPeak {
    double frequency = 0.0;
    double amplitude = 0.0;
};

/// Hann-windowed, zero-padded FFT of a uniformly sampled signal; local maxima of
/// the magnitude above `threshold` times the largest one, sorted by frequency.
/// The returned frequency resolution is the bin width 2π/duration.
std::vector<SpectralPeak> spectrum_peaks(const std::vector<double>& samples, double dt,
                                         double threshold = 0.01);

/// spectrum_peaks applied to x_osc (or to probe `probe` when given).
std::vector<SpectralPeak> spectrum_from_timeseries(const TimeSeries& series, double threshold = 0.01,
                                                   std::optional<std::size_t> probe = std::nullopt);

/// 2π / (sampled duration).
double bin_width(const TimeSeries& series);

} // namespace springstring
