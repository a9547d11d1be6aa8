#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "drocal/rng.hpp"
#include "drocal/types.hpp"

namespace drocal {

// Black-box simulator contract. Implementations must be deterministic in
// their inputs and safe to call from multiple threads.
class Simulator {
  public:
    virtual ~Simulator() = default;
    virtual Trajectory run(const AleatoryPoint& a, const EpistemicPoint& e,
                           const std::optional<Design>& design, int steps,
                           double dt) const = 0;
    // how many channels a run will produce
    virtual int channel_count() const = 0;
};

// Named marginal distribution for one aleatory dimension of the ground truth.
struct Marginal {
    enum class Kind { Uniform, Beta };
    Kind kind = Kind::Uniform;
    double p1 = 0.0; // Uniform: lo,  Beta: alpha
    double p2 = 1.0; // Uniform: hi,  Beta: beta

    static Marginal uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
    static Marginal beta(double alpha, double beta) { return {Kind::Beta, alpha, beta}; }

    double sample(Stream& stream) const;
    double mean() const;
};

// Ground truth used by the data generator and the coverage experiments:
// the true epistemic point plus the true aleatory marginals.
struct SyntheticTruth {
    EpistemicPoint e_true;
    std::vector<Marginal> marginals;
};

// The "osc2" benchmark system: a two-tone sinusoid observed over a uniform
// time grid. Tone amplitudes, frequencies and the common phase depend on the
// aleatory vector a in [0,1]^3; tone gains and the DC offset depend on the
// epistemic vector e in [0,2]^4. e4 enters only through the 0.01*e4 offset,
// so it is deliberately the hardest dimension to identify. Channel 0 is the
// primary output y; channels 1 and 2 are auxiliary observables with the same
// spectral skeleton.
struct OscBenchmark final : Simulator {
    Box box_a{Vector{0.0, 0.0, 0.0}, Vector{1.0, 1.0, 1.0}};
    Box box_e{Vector{0.0, 0.0, 0.0, 0.0}, Vector{2.0, 2.0, 2.0, 2.0}};
    int default_steps = 127;  // trajectory has default_steps + 1 samples
    double default_dt = 0.1;
    int channels = 1;         // 1 or 3

    Trajectory run(const AleatoryPoint& a, const EpistemicPoint& e,
                   const std::optional<Design>& design, int steps,
                   double dt) const override;
    int channel_count() const override { return channels; }

    // tone frequencies as functions of (a, e)
    static double tone1_freq(const AleatoryPoint& a, const EpistemicPoint& e);
    static double tone2_freq(const AleatoryPoint& a);
};

// osc2 ground truth: e_true = (0.5, 1.0, 0.3, 1.7),
// a1 ~ Beta(2,5), a2 ~ Uniform(0,1), a3 ~ Beta(5,2).
SyntheticTruth osc_truth();

// Requirement functions for the osc2 benchmark (design dimension 2):
//   g1 = e1 (0.5 + a1) - theta1
//   g2 = 0.4 e2 (0.5 + a3) - theta2
//   g3 = g1 + g2 - 0.1
// Requirement i fails when g_i >= 0.
Vector evaluate_requirements(const AleatoryPoint& a, const EpistemicPoint& e,
                             const Design& theta);
constexpr int kRequirementCount = 3;

// n i.i.d. uniform points in the box. Point j depends only on (key, j).
std::vector<Vector> sample_uniform_box(const Box& box, std::size_t n, SeedKey key);

// n i.i.d. draws from the ground-truth marginals.
std::vector<AleatoryPoint> sample_truth(const SyntheticTruth& truth, std::size_t n,
                                        SeedKey key);

} // namespace drocal
