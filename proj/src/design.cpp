#include "drocal/design.hpp"

#include <algorithm>
#include <cmath>

#include "drocal/errors.hpp"
#include "drocal/parallel.hpp"

namespace drocal {

KWResult kw_optimize(const Design& theta_baseline, const KWParams& params,
                     const KWObjective& objective, SeedKey key,
                     KWTrace* partial_trace) {
    if (!(params.c0 > 0.0) || !(params.a0 > 0.0) || params.n_max < 1) {
        throw DomainError("KW parameters must satisfy c0, a0 > 0 and n_max >= 1");
    }
    const std::size_t dim = theta_baseline.theta.size();
    if (dim == 0) throw DomainError("empty design vector");

    Vector scale = theta_baseline.theta;
    for (std::size_t d = 0; d < dim; ++d) {
        if (!std::isfinite(scale[d])) throw DomainError("non-finite baseline design");
        if (scale[d] == 0.0) {
            warn("baseline design component " + std::to_string(d) +
                 " is zero; using unit scale for its updates");
            scale[d] = 1.0;
        }
    }
    const auto denormalize = [&](const Vector& x) {
        Design theta;
        theta.theta.resize(dim);
        for (std::size_t d = 0; d < dim; ++d) theta.theta[d] = scale[d] * x[d];
        return theta;
    };

    KWResult result;
    Vector x(dim, 1.0);
    result.trace.initial_objective = objective(denormalize(x), key.child("init"));

    for (int n = 1; n <= params.n_max; ++n) {
        const double c_n = params.c0 / std::pow(static_cast<double>(n), 0.25);
        const double a_n = params.a0 / static_cast<double>(n);
        for (std::size_t i = 0; i < dim; ++i) {
            const SeedKey pair_key =
                key.child("sweep").child(static_cast<std::uint64_t>(n)).child(i);
            Vector x_up = x, x_down = x;
            x_up[i] += c_n;
            x_down[i] -= c_n;
            double up = 0.0, down = 0.0;
            try {
                up = objective(denormalize(x_up), pair_key);
                down = objective(denormalize(x_down), pair_key);
            } catch (const std::exception& ex) {
                if (partial_trace != nullptr) *partial_trace = result.trace;
                throw SolverError("objective evaluation failed at sweep " +
                                  std::to_string(n) + ", coordinate " +
                                  std::to_string(i) + ": " + ex.what());
            }
            const double g = (up - down) / (2.0 * c_n);
            x[i] -= a_n * g;
            result.trace.evals.push_back(KWEval{n, static_cast<int>(i), up, down, g, x});
        }
    }
    result.trace.final_objective = objective(denormalize(x), key.child("final"));
    result.theta_new = denormalize(x);
    return result;
}

double robust_objective(const Design& theta, const std::vector<EpistemicPoint>& eligible,
                        const RobustObjectiveContext& ctx, SeedKey sample_key) {
    if (eligible.empty()) throw DomainError("robust objective needs eligible points");
    if (ctx.k == 0 || ctx.sim == nullptr) throw DomainError("bad objective context");

    std::vector<AleatoryPoint> points;
    points.reserve(ctx.k);
    for (auto& p : sample_uniform_box(ctx.box_a, ctx.k, sample_key)) {
        points.push_back(AleatoryPoint{std::move(p)});
    }

    ReliabilityContext rel;
    rel.sim = ctx.sim;
    rel.data_summaries = ctx.data_summaries;
    rel.spec = ctx.spec;
    rel.thr = ctx.thr;
    rel.points = std::move(points);
    rel.steps = ctx.steps;
    rel.dt = ctx.dt;
    rel.requirements = ctx.requirements;

    std::vector<double> inner(eligible.size(), -1.0);
    parallel_for(eligible.size(), ctx.threads, [&](std::size_t idx) {
        auto u = rel.try_polytope(eligible[idx]);
        if (!u) return; // stays -1, treated as skipped
        Vector c(rel.points.size(), 0.0);
        for (std::size_t j = 0; j < rel.points.size(); ++j) {
            const Vector g = rel.requirements(rel.points[j], eligible[idx], theta);
            bool any = false;
            for (double gi : g) any = any || gi >= 0.0;
            c[j] = any ? 1.0 : 0.0;
        }
        inner[idx] = std::clamp(bound_linear_functional(*u, c, false).value, 0.0, 1.0);
    });

    double worst = -1.0;
    std::size_t skipped = 0;
    for (double v : inner) {
        if (v < 0.0) ++skipped;
        else worst = std::max(worst, v);
    }
    if (worst < 0.0) {
        throw DomainError("every eligible point had an empty polytope for this sample");
    }
    if (skipped > 0) {
        warn(std::to_string(skipped) + " point(s) skipped in the robust objective");
    }
    return worst;
}

KWObjective make_robust_objective(const std::vector<EpistemicPoint>& eligible,
                                  const RobustObjectiveContext& ctx) {
    std::vector<EpistemicPoint> points = eligible;
    return [points, ctx](const Design& theta, SeedKey sample_key) {
        return robust_objective(theta, points, ctx, sample_key);
    };
}

DesignReport design_report(const Design& theta,
                           const std::vector<EpistemicPoint>& eligible,
                           const ReliabilityContext& ctx, int threads) {
    DesignReport report;
    report.reliability = reliability_report(eligible, theta, ctx, threads);
    for (const auto& row : report.reliability.per_e) {
        report.objective = std::max(report.objective, row.r_min);
    }
    return report;
}

} // namespace drocal
