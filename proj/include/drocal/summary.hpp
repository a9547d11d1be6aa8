#pragma once

#include <complex>
#include <string>
#include <vector>

#include "drocal/types.hpp"

namespace drocal {

// One spectral peak to extract: the extremum of the chosen part of the DFT
// coefficients over a frequency band, reported as (value, frequency).
struct PeakSpec {
    enum class Part { Real, Imag };
    enum class Direction { Max, Min };

    Part part = Part::Real;
    double band_lo = 0.0; // Hz, inclusive
    double band_hi = 0.0; // Hz, inclusive
    Direction direction = Direction::Max;
};

// Peak extraction plan for a whole trajectory: a peak list per channel.
// Summary dimension m = 2 * total number of peaks.
struct SummarySpec {
    std::vector<std::vector<PeakSpec>> per_channel;

    std::size_t channel_count() const { return per_channel.size(); }
    std::size_t dimension() const;
    // stable identifier of the spec contents (persisted as provenance)
    std::string hash() const;
    // column names, one per summary coordinate
    std::vector<std::string> column_names() const;
};

// Full-length DFT of one channel: coefficients C_k = (1/N) sum_t y_t
// exp(-2*pi*i*k*t/N) for k = 0..N-1, with frequencies k/(N*dt).
struct DftResult {
    std::vector<double> frequencies;
    std::vector<std::complex<double>> coefficients;
};
DftResult dft_coefficients(const Trajectory& traj, std::size_t channel);

// Extract the requested peaks from one channel's spectrum. Ties between bins
// with equal extremal value break toward the lowest frequency.
Vector extract_peaks(const std::vector<double>& frequencies,
                     const std::vector<std::complex<double>>& coefficients,
                     const std::vector<PeakSpec>& specs);

// Concatenated per-channel peak extraction in spec order.
Vector summarize(const Trajectory& traj, const SummarySpec& spec);

// Summarize a batch of trajectories into an (n x m) matrix.
Matrix summarize_all(const std::vector<Trajectory>& trajectories,
                     const SummarySpec& spec);

// Default peak plans. The low band is [0, 1.59] Hz; the high band is
// [1.71, min(5.98, nyquist)] Hz where nyquist = 1/(2*dt).
// The primary channel gets 6 peaks (m = 12); auxiliary channels get 5 peaks
// (10 summary coordinates each), so three channels give m = 32.
SummarySpec default_summary_spec(int channels, double dt);

} // namespace drocal
