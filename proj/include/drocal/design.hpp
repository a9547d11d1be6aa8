#pragma once

#include <functional>
#include <vector>

#include "drocal/aleatory.hpp"
#include "drocal/eligibility.hpp"
#include "drocal/model.hpp"
#include "drocal/rng.hpp"
#include "drocal/types.hpp"

namespace drocal {

// Coordinate-descent Kiefer-Wolfowitz settings. Sweep n uses step size
// c_n = c0 / n^(1/4) and gain a_n = a0 / n.
struct KWParams {
    double c0 = 0.1;
    double a0 = 0.1;
    int n_max = 8;
    std::size_t e_cap = 0; // 0 = use every eligible point in the objective
};

struct KWEval {
    int sweep = 0;
    int coord = 0;
    double up = 0.0;       // f at +c_n perturbation
    double down = 0.0;     // f at -c_n perturbation
    double gradient = 0.0; // (up - down) / (2 c_n)
    Vector x_after;        // normalized iterate after the step
};

struct KWTrace {
    std::vector<KWEval> evals;
    double initial_objective = 0.0;
    double final_objective = 0.0;
};

// Objective callback: value at theta, with a seed key identifying the common
// random substream for this evaluation pair.
using KWObjective = std::function<double(const Design&, SeedKey)>;

struct KWResult {
    Design theta_new;
    KWTrace trace;
};

// Algorithm: normalize theta by its baseline (Hadamard), start at all-ones,
// sweep the coordinates with central finite differences. Baseline components
// equal to zero get scale 1.0 with a warning. If an objective evaluation
// throws, the evaluations so far are copied into *partial_trace (when given)
// before the error propagates.
KWResult kw_optimize(const Design& theta_baseline, const KWParams& params,
                     const KWObjective& objective, SeedKey key,
                     KWTrace* partial_trace = nullptr);

// Everything needed to evaluate the robust objective at a design point with
// freshly sampled aleatory points.
struct RobustObjectiveContext {
    const Simulator* sim = nullptr;
    Matrix data_summaries;
    SummarySpec spec;
    KSThreshold thr;
    Box box_a;
    std::size_t k = 0;
    int steps = 127;
    double dt = 0.1;
    int threads = 1;
    RequirementFn requirements = evaluate_requirements;
};

// max over eligible e of (min over W in the e-polytope of the weighted
// any-requirement failure probability). Points whose fresh polytope is empty
// are skipped with a warning.
double robust_objective(const Design& theta, const std::vector<EpistemicPoint>& eligible,
                        const RobustObjectiveContext& ctx, SeedKey sample_key);

// Convenience: the objective bound to a fixed eligible set, sampling fresh
// aleatory points per evaluation key, suitable for kw_optimize.
KWObjective make_robust_objective(const std::vector<EpistemicPoint>& eligible,
                                  const RobustObjectiveContext& ctx);

// Reliability report for a design bundled with the worst-case best-case
// failure probability, both computed on the context's shared sample. The
// objective never exceeds the top of the any-requirement range.
struct DesignReport {
    ReliabilityReport reliability;
    double objective = 0.0;
};
DesignReport design_report(const Design& theta,
                           const std::vector<EpistemicPoint>& eligible,
                           const ReliabilityContext& ctx, int threads = 1);

} // namespace drocal
