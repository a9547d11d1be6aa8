#include "drocal/model.hpp"

#include <cmath>
#include <numbers>

#include "drocal/errors.hpp"

namespace drocal {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double Marginal::sample(Stream& stream) const {
    switch (kind) {
        case Kind::Uniform: return stream.next_uniform(p1, p2);
        case Kind::Beta: return stream.next_beta(p1, p2);
    }
    throw DomainError("unknown marginal kind");
}

double Marginal::mean() const {
    switch (kind) {
        case Kind::Uniform: return 0.5 * (p1 + p2);
        case Kind::Beta: return p1 / (p1 + p2);
    }
    throw DomainError("unknown marginal kind");
}

double OscBenchmark::tone1_freq(const AleatoryPoint& a, const EpistemicPoint& e) {
    return 0.9 + 0.22 * e.e[2] + 0.5 * (a.a[0] - 0.5);
}

double OscBenchmark::tone2_freq(const AleatoryPoint& a) {
    return 2.44 + 0.6 * (a.a[2] - 0.5);
}

Trajectory OscBenchmark::run(const AleatoryPoint& a, const EpistemicPoint& e,
                             const std::optional<Design>& /*design*/, int steps,
                             double dt) const {
    if (!box_a.contains(a.a)) throw DomainError("aleatory point outside its box");
    if (!box_e.contains(e.e)) throw DomainError("epistemic point outside its box");
    if (steps < 2) throw DomainError("trajectory needs at least 2 steps");
    if (!(dt > 0.0)) throw DomainError("dt must be positive");
    if (channels != 1 && channels != 3) throw DomainError("osc2 supports 1 or 3 channels");

    const double amp1 = e.e[0] * (0.5 + a.a[0]);
    const double amp2 = 0.4 * e.e[1] * (0.5 + a.a[2]);
    const double f1 = tone1_freq(a, e);
    const double f2 = tone2_freq(a);
    const double phase = kTwoPi * a.a[1];
    const double offset = 0.01 * e.e[3];

    Trajectory traj;
    traj.dt = dt;
    traj.channels.resize(static_cast<std::size_t>(channels));
    const std::size_t len = static_cast<std::size_t>(steps) + 1;
    for (auto& ch : traj.channels) ch.resize(len);

    for (std::size_t t = 0; t < len; ++t) {
        const double w1 = kTwoPi * f1 * static_cast<double>(t) * dt + phase;
        const double w2 = kTwoPi * f2 * static_cast<double>(t) * dt + phase;
        traj.channels[0][t] = amp1 * std::sin(w1) + amp2 * std::cos(w2) + offset;
        if (channels == 3) {
            traj.channels[1][t] = 0.7 * e.e[1] * (0.5 + a.a[2]) * std::sin(w2) +
                                  0.2 * e.e[0] * std::cos(w1) + offset;
            traj.channels[2][t] = 0.5 * e.e[2] * std::sin(w1) +
                                  0.3 * (0.5 + a.a[0]) * std::cos(w2) + offset;
        }
    }
    return traj;
}

SyntheticTruth osc_truth() {
    SyntheticTruth truth;
    truth.e_true = EpistemicPoint{Vector{0.5, 1.0, 0.3, 1.7}};
    truth.marginals = {Marginal::beta(2.0, 5.0), Marginal::uniform(0.0, 1.0),
                       Marginal::beta(5.0, 2.0)};
    return truth;
}

Vector evaluate_requirements(const AleatoryPoint& a, const EpistemicPoint& e,
                             const Design& theta) {
    if (a.a.size() < 3 || e.e.size() < 2) {
        throw DomainError("requirements need a in R^3 and e in R^2+");
    }
    if (theta.theta.size() != 2) {
        throw DomainError("osc2 requirements expect a 2-dimensional design");
    }
    const double g1 = e.e[0] * (0.5 + a.a[0]) - theta.theta[0];
    const double g2 = 0.4 * e.e[1] * (0.5 + a.a[2]) - theta.theta[1];
    const double g3 = g1 + g2 - 0.1;
    return Vector{g1, g2, g3};
}

std::vector<Vector> sample_uniform_box(const Box& box, std::size_t n, SeedKey key) {
    if (n == 0) throw DomainError("sample count must be at least 1");
    std::vector<Vector> points(n);
    for (std::size_t j = 0; j < n; ++j) {
        Stream stream = stream_at(key, j);
        Vector p(box.dim());
        for (std::size_t d = 0; d < box.dim(); ++d) {
            p[d] = stream.next_uniform(box.lower[d], box.upper[d]);
        }
        points[j] = std::move(p);
    }
    return points;
}

std::vector<AleatoryPoint> sample_truth(const SyntheticTruth& truth, std::size_t n,
                                        SeedKey key) {
    if (n == 0) throw DomainError("sample count must be at least 1");
    std::vector<AleatoryPoint> points(n);
    for (std::size_t j = 0; j < n; ++j) {
        Stream stream = stream_at(key, j);
        Vector p(truth.marginals.size());
        for (std::size_t d = 0; d < truth.marginals.size(); ++d) {
            p[d] = truth.marginals[d].sample(stream);
        }
        points[j] = AleatoryPoint{std::move(p)};
    }
    return points;
}

} // namespace drocal
