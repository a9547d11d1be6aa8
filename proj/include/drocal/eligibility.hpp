#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drocal/ksstat.hpp"
#include "drocal/model.hpp"
#include "drocal/summary.hpp"
#include "drocal/types.hpp"

namespace drocal {

// The sampled band LP for one epistemic point. For every data index i and
// summary coordinate v there is one constraint pair on the weighted count
//   G_{v,i}(W) = sum_j W_j * I(sim summary v of point j <= data summary v of i):
//   F(s+) - q/sqrt(n1) <= G_{v,i}(W) <= F(s-) + q/sqrt(n1)
// together with the probability-simplex constraint on W.
struct BandLP {
    struct RowPair {
        std::size_t coord = 0;      // v
        std::size_t data_index = 0; // i
        std::size_t prefix = 0;     // #sim points with summary <= data value
        double lo = 0.0;            // F(s+), i.e. the ECDF value at s
        double hi = 0.0;            // F(s-), the left limit
    };

    Matrix data_summaries; // n1 x m
    Matrix sim_summaries;  // k x m
    std::size_t n1 = 0, m = 0, k = 0;
    double sqrt_n1 = 0.0;
    std::vector<RowPair> rows;                    // n1*m entries
    std::vector<std::vector<std::size_t>> order;  // per coord: sim indices sorted by value

    // indicator matrix entry M[v][i][j]
    bool indicator(std::size_t v, std::size_t i, std::size_t j) const {
        return sim_summaries(j, v) <= data_summaries(i, v);
    }
    std::size_t band_row_count() const { return 2 * rows.size(); }
};

BandLP build_lp(const Matrix& data_summaries, const Matrix& sim_summaries);

// Rows sharing (coord, prefix) constrain the same weighted count; solvers
// work on the deduplicated system with the tightest bounds per group.
// Duplicated data values produce exactly such repeats.
struct MergedBandRow {
    std::size_t coord = 0;
    std::size_t prefix = 0;
    double lo = 0.0;
    double hi = 0.0;
};
std::vector<MergedBandRow> merged_band_rows(const BandLP& lp);

struct QStarResult {
    double q_star = 0.0;
    Vector weights;
    long iterations = 0;
};

// Minimal band half-width (in q units) admitting feasible weights, plus an
// optimal weight witness. Always feasible: a large enough q relaxes all bands.
QStarResult solve_q_star(const BandLP& lp);

// True iff the fixed-q band system admits feasible weights. Monotone in q.
bool check_feasible(const BandLP& lp, double q);

struct EligibilityRecord {
    EpistemicPoint e;
    double q_star = 0.0;
    Vector witness_weights;
    bool eligible = false;
};

struct Provenance {
    std::uint64_t seed = 0;
    std::size_t n1 = 0, n2 = 0, k = 0;
    std::string spec_hash;
    bool resample_per_e = false;
};

struct EligibilitySet {
    std::vector<EligibilityRecord> records;
    KSThreshold threshold;
    Provenance provenance;
    Box box_e;

    std::size_t eligible_count() const;
    std::vector<const EligibilityRecord*> eligible_records() const;
};

struct EligibilityConfig {
    Box box_e;
    Box box_a;
    std::size_t n2 = 1000;
    std::size_t k = 1000;
    int steps = 127;
    double dt = 0.1;
    bool resample_per_e = false;
    int threads = 1;
    std::uint64_t seed = 0;
};

// Simulate the shared aleatory sample at one epistemic point and summarize.
Matrix sim_summaries_at(const Simulator& sim, const std::vector<AleatoryPoint>& points,
                        const EpistemicPoint& e, const SummarySpec& spec, int steps,
                        double dt);

// q* of a single epistemic point against prepared data summaries; this is
// the per-record code path used by the full set construction.
QStarResult qstar_for_point(const Simulator& sim, const Matrix& data_summaries,
                            const std::vector<AleatoryPoint>& points,
                            const EpistemicPoint& e, const SummarySpec& spec, int steps,
                            double dt);

// Sample n2 epistemic points over the box, solve the band LP for each, and
// flag those with q* <= threshold.q. Deterministic in cfg.seed; records are
// ordered by sample index regardless of thread scheduling.
EligibilitySet construct_eligibility_set(const Simulator& sim,
                                         const std::vector<Trajectory>& data,
                                         const SummarySpec& spec,
                                         const KSThreshold& thr,
                                         const EligibilityConfig& cfg);

// Per-dimension shrinkage score: 1 - (2.5..97.5 percentile span of eligible
// points) / (box span). Higher score = dimension better pinned by the data.
struct RankingEntry {
    std::size_t dim = 0;
    double score = 0.0;
};
std::vector<RankingEntry> rank_parameters(const EligibilitySet& set);

// Drop the r% of eligible records with the largest q*; report the new cutoff
// q_r and the implied Bonferroni level alpha_tilde = m * (1 - K(q_r)).
struct ReducedSet {
    EligibilitySet set;
    double q_r = 0.0;
    double alpha_tilde = 0.0;
};
ReducedSet reduce_set(const EligibilitySet& set, double r_percent);

// Repeatedly rebuild the eligibility set from without-replacement subsamples
// of the data; reports the mean eligible fraction per subsample size.
struct SubsampleRow {
    std::size_t size = 0;
    double mean_eligible_fraction = 0.0;
};
std::vector<SubsampleRow> subsample_study(const Simulator& sim,
                                          const std::vector<Trajectory>& data,
                                          const std::vector<std::size_t>& sizes,
                                          std::size_t replications, double alpha,
                                          const SummarySpec& spec,
                                          const EligibilityConfig& cfg);

} // namespace drocal
