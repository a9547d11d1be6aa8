#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "drocal/eligibility.hpp"
#include "drocal/errors.hpp"
#include "drocal/ksstat.hpp"
#include "drocal/model.hpp"
#include "drocal/summary.hpp"
#include "drocal/types.hpp"

namespace drocal {

// Raised when the band constraints at the fixed threshold admit no weights,
// i.e. the epistemic point behind the polytope is not eligible.
class EmptyPolytopeError : public DomainError {
  public:
    explicit EmptyPolytopeError(const std::string& what) : DomainError(what) {}
};

// The feasible weight set at a fixed threshold q: all probability weights on
// the generating aleatory points whose implied summary CDFs stay inside every
// KS band. A discrete ambiguity set for the aleatory distribution.
struct WeightPolytope {
    BandLP lp;
    double q = 0.0;
    std::vector<AleatoryPoint> points;

    std::size_t size() const { return points.size(); }
};

WeightPolytope make_polytope(const Matrix& data_summaries, const Matrix& sim_summaries,
                             std::vector<AleatoryPoint> points, const KSThreshold& thr);

struct BoundResult {
    double value = 0.0;
    Vector weights;
};

// Optimize a linear functional sum_j c_j W_j over the polytope.
// Throws EmptyPolytopeError when the polytope is infeasible.
BoundResult bound_linear_functional(const WeightPolytope& u, const Vector& c,
                                    bool maximize);

using RequirementFn =
    std::function<Vector(const AleatoryPoint&, const EpistemicPoint&, const Design&)>;

// Everything needed to rebuild the per-e polytope and failure indicators.
struct ReliabilityContext {
    const Simulator* sim = nullptr;
    Matrix data_summaries;
    SummarySpec spec;
    KSThreshold thr;
    std::vector<AleatoryPoint> points; // shared aleatory sample
    int steps = 127;
    double dt = 0.1;
    RequirementFn requirements = evaluate_requirements;

    std::optional<WeightPolytope> try_polytope(const EpistemicPoint& e) const;
};

// [lo, hi] of the failure probability of requirement `which` (or of any
// requirement when `which` is nullopt) over all eligible points and weights.
std::array<double, 2> failure_probability_range(
    const std::vector<EpistemicPoint>& eligible, const Design& theta,
    std::optional<int> which, const ReliabilityContext& ctx);

// Worst-case expected truncated violation of requirement i.
double severity(const std::vector<EpistemicPoint>& eligible, const Design& theta,
                int which, const ReliabilityContext& ctx);

struct RminRmax {
    double r_min = 0.0;
    double r_max = 0.0;
    Vector w_min; // weights attaining r_min
};

// Best- and worst-case any-requirement failure probability at a fixed
// eligible point.
RminRmax rmin_rmax(const EpistemicPoint& e, const Design& theta,
                   const WeightPolytope& u, const ReliabilityContext& ctx);

// Failing sample points that carry best-case weight above `weight_cut`,
// grouped by which requirements fail there. Empty unless r_min > notable_cut.
struct RealizationGroup {
    std::vector<int> failing;           // indices of failing requirements
    std::vector<AleatoryPoint> members;
    std::vector<double> weights;
};
std::vector<RealizationGroup> representative_realizations(
    const EpistemicPoint& e, const Design& theta, const WeightPolytope& u,
    const ReliabilityContext& ctx, double weight_cut = 0.05, double notable_cut = 0.1);

// the filtering/grouping core behind representative_realizations: keep points
// whose weight exceeds the cut and that fail at least one requirement, keyed
// by the failing-requirement pattern
std::vector<RealizationGroup> group_failing_points(
    const std::vector<AleatoryPoint>& points, const Vector& weights,
    const std::function<Vector(const AleatoryPoint&)>& requirements_at,
    double weight_cut);

struct ReliabilityReport {
    std::vector<std::array<double, 2>> requirement_ranges; // one per requirement
    std::array<double, 2> any_range{0.0, 0.0};
    std::vector<double> severities;
    struct PerE {
        EpistemicPoint e;
        double r_min = 0.0;
        double r_max = 0.0;
    };
    std::vector<PerE> per_e;
    std::size_t skipped = 0; // eligible points whose polytope was empty
};

// Full report over a set of eligible points; points with an empty polytope
// are skipped with a warning.
ReliabilityReport reliability_report(const std::vector<EpistemicPoint>& eligible,
                                     const Design& theta, const ReliabilityContext& ctx,
                                     int threads = 1);

} // namespace drocal
