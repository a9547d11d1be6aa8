#include "drocal/summary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "drocal/errors.hpp"

namespace drocal {

std::size_t SummarySpec::dimension() const {
    std::size_t peaks = 0;
    for (const auto& ch : per_channel) peaks += ch.size();
    return 2 * peaks;
}

std::string SummarySpec::hash() const {
    // FNV-1a over a canonical rendering
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    };
    char buf[96];
    for (const auto& ch : per_channel) {
        feed("|");
        for (const auto& p : ch) {
            std::snprintf(buf, sizeof(buf), "%s,%.12g,%.12g,%s;",
                          p.part == PeakSpec::Part::Real ? "re" : "im", p.band_lo,
                          p.band_hi, p.direction == PeakSpec::Direction::Max ? "max" : "min");
            feed(buf);
        }
    }
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

std::vector<std::string> SummarySpec::column_names() const {
    std::vector<std::string> names;
    names.reserve(dimension());
    char buf[128];
    for (std::size_t c = 0; c < per_channel.size(); ++c) {
        for (const auto& p : per_channel[c]) {
            for (const char* what : {"value", "freq"}) {
                std::snprintf(buf, sizeof(buf), "ch%zu_%s_%g-%gHz_%s_%s", c,
                              p.part == PeakSpec::Part::Real ? "real" : "imag", p.band_lo,
                              p.band_hi,
                              p.direction == PeakSpec::Direction::Max ? "max" : "min", what);
                names.emplace_back(buf);
            }
        }
    }
    return names;
}

DftResult dft_coefficients(const Trajectory& traj, std::size_t channel) {
    traj.validate();
    if (channel >= traj.channels.size()) throw DomainError("channel index out of range");
    const auto& y = traj.channels[channel];
    const std::size_t n = y.size();

    // twiddle table: w[q] = exp(-2*pi*i*q/n); index with (k*t) mod n
    std::vector<std::complex<double>> twiddle(n);
    for (std::size_t q = 0; q < n; ++q) {
        const double ang = -2.0 * std::numbers::pi * static_cast<double>(q) /
                           static_cast<double>(n);
        twiddle[q] = {std::cos(ang), std::sin(ang)};
    }

    DftResult out;
    out.frequencies.resize(n);
    out.coefficients.resize(n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        double re = 0.0, im = 0.0;
        std::size_t idx = 0;
        for (std::size_t t = 0; t < n; ++t) {
            const auto& w = twiddle[idx];
            re += y[t] * w.real();
            im += y[t] * w.imag();
            idx += k;
            if (idx >= n) idx -= n;
        }
        out.coefficients[k] = {re * inv_n, im * inv_n};
        out.frequencies[k] = static_cast<double>(k) / (static_cast<double>(n) * traj.dt);
    }
    return out;
}

Vector extract_peaks(const std::vector<double>& frequencies,
                     const std::vector<std::complex<double>>& coefficients,
                     const std::vector<PeakSpec>& specs) {
    if (frequencies.size() != coefficients.size()) {
        throw DomainError("frequency/coefficient length mismatch");
    }
    Vector out;
    out.reserve(2 * specs.size());
    for (const auto& spec : specs) {
        if (!(spec.band_lo <= spec.band_hi)) throw DomainError("peak band is empty");
        std::size_t best = frequencies.size();
        double best_val = 0.0;
        for (std::size_t k = 0; k < frequencies.size(); ++k) {
            const double f = frequencies[k];
            if (f < spec.band_lo || f > spec.band_hi) continue;
            const double v = spec.part == PeakSpec::Part::Real ? coefficients[k].real()
                                                               : coefficients[k].imag();
            if (best == frequencies.size()) {
                best = k;
                best_val = v;
                continue;
            }
            // frequencies ascend with k, so strict comparison keeps the
            // lowest-frequency bin on ties
            const bool better = spec.direction == PeakSpec::Direction::Max ? v > best_val
                                                                           : v < best_val;
            if (better) {
                best = k;
                best_val = v;
            }
        }
        if (best == frequencies.size()) {
            throw DomainError("peak band contains no DFT bin");
        }
        out.push_back(best_val);
        out.push_back(frequencies[best]);
    }
    return out;
}

Vector summarize(const Trajectory& traj, const SummarySpec& spec) {
    if (spec.channel_count() != traj.channels.size()) {
        throw DomainError("summary spec channel count does not match trajectory");
    }
    Vector s;
    s.reserve(spec.dimension());
    for (std::size_t c = 0; c < spec.channel_count(); ++c) {
        const DftResult dft = dft_coefficients(traj, c);
        Vector part = extract_peaks(dft.frequencies, dft.coefficients, spec.per_channel[c]);
        s.insert(s.end(), part.begin(), part.end());
    }
    return s;
}

Matrix summarize_all(const std::vector<Trajectory>& trajectories, const SummarySpec& spec) {
    if (trajectories.empty()) throw DomainError("no trajectories to summarize");
    Matrix out(trajectories.size(), spec.dimension());
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        const Vector s = summarize(trajectories[i], spec);
        for (std::size_t j = 0; j < s.size(); ++j) out(i, j) = s[j];
    }
    return out;
}

SummarySpec default_summary_spec(int channels, double dt) {
    if (!(dt > 0.0)) throw DomainError("dt must be positive");
    if (channels != 1 && channels != 3) {
        throw DomainError("default summary spec supports 1 or 3 channels");
    }
    const double nyquist = 0.5 / dt;
    const double b1_lo = 0.0, b1_hi = 1.59;
    const double b2_lo = 1.71, b2_hi = std::min(5.98, nyquist);
    if (!(b2_lo < b2_hi) || !(b1_hi < nyquist)) {
        throw DomainError("sampling rate too low for the default bands");
    }
    using P = PeakSpec::Part;
    using D = PeakSpec::Direction;
    const std::vector<PeakSpec> primary = {
        {P::Real, b1_lo, b1_hi, D::Max}, {P::Real, b1_lo, b1_hi, D::Min},
        {P::Real, b2_lo, b2_hi, D::Max}, {P::Real, b2_lo, b2_hi, D::Min},
        {P::Imag, b1_lo, b1_hi, D::Min}, {P::Imag, b2_lo, b2_hi, D::Max},
    };
    const std::vector<PeakSpec> auxiliary = {
        {P::Real, b1_lo, b1_hi, D::Max}, {P::Real, b1_lo, b1_hi, D::Min},
        {P::Real, b2_lo, b2_hi, D::Max}, {P::Imag, b1_lo, b1_hi, D::Min},
        {P::Imag, b2_lo, b2_hi, D::Max},
    };

    SummarySpec spec;
    spec.per_channel.push_back(primary);
    for (int c = 1; c < channels; ++c) spec.per_channel.push_back(auxiliary);
    return spec;
}

} // namespace drocal
