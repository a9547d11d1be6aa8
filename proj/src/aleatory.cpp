#include "drocal/aleatory.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "drocal/errors.hpp"
#include "drocal/parallel.hpp"
#include "drocal/simplex.hpp"

namespace drocal {

WeightPolytope make_polytope(const Matrix& data_summaries, const Matrix& sim_summaries,
                             std::vector<AleatoryPoint> points, const KSThreshold& thr) {
    if (points.size() != sim_summaries.rows()) {
        throw DomainError("polytope points and summaries disagree in count");
    }
    WeightPolytope u;
    u.lp = build_lp(data_summaries, sim_summaries);
    u.q = thr.q;
    u.points = std::move(points);
    return u;
}

namespace {

// fixed-q band rows with vacuous bounds dropped
void add_band_rows(LinearProgram& prog, const BandLP& lp, double q) {
    const double eta = q / lp.sqrt_n1;
    for (const auto& row : merged_band_rows(lp)) {
        const double lo = row.lo - eta;
        const double hi = row.hi + eta;
        if (lo <= 0.0 && hi >= 1.0) continue;
        Vector coeffs(lp.k, 0.0);
        const auto& ord = lp.order[row.coord];
        for (std::size_t t = 0; t < row.prefix; ++t) coeffs[ord[t]] = 1.0;
        if (lo > 0.0) prog.add_row(coeffs, RowSense::GreaterEq, lo);
        if (hi < 1.0) prog.add_row(std::move(coeffs), RowSense::LessEq, hi);
    }
}

} // namespace

BoundResult bound_linear_functional(const WeightPolytope& u, const Vector& c,
                                    bool maximize) {
    if (c.size() != u.lp.k) throw DomainError("functional length must equal k");
    LinearProgram prog(u.lp.k);
    add_band_rows(prog, u.lp, u.q);
    prog.add_row(Vector(u.lp.k, 1.0), RowSense::Equal, 1.0);
    prog.set_objective(c, maximize);
    LpSolution sol = prog.solve();
    if (sol.status == LpStatus::Infeasible) {
        throw EmptyPolytopeError("weight polytope is empty at q = " + std::to_string(u.q));
    }
    if (sol.status != LpStatus::Optimal) {
        throw SolverError("polytope bound did not reach an optimum");
    }
    BoundResult out;
    out.value = sol.value;
    out.weights = std::move(sol.x);
    for (double& w : out.weights) {
        if (w < 0.0) w = 0.0;
    }
    return out;
}

std::optional<WeightPolytope> ReliabilityContext::try_polytope(
    const EpistemicPoint& e) const {
    const Matrix sims = sim_summaries_at(*sim, points, e, spec, steps, dt);
    WeightPolytope u = make_polytope(data_summaries, sims, points, thr);
    if (!check_feasible(u.lp, u.q)) return std::nullopt;
    return u;
}

namespace {

// failure indicator / payoff vectors over the shared sample
Vector indicator_vector(const ReliabilityContext& ctx, const EpistemicPoint& e,
                        const Design& theta, std::optional<int> which) {
    Vector c(ctx.points.size(), 0.0);
    for (std::size_t j = 0; j < ctx.points.size(); ++j) {
        const Vector g = ctx.requirements(ctx.points[j], e, theta);
        if (which.has_value()) {
            c[j] = g[static_cast<std::size_t>(*which)] >= 0.0 ? 1.0 : 0.0;
        } else {
            bool any = false;
            for (double gi : g) any = any || gi >= 0.0;
            c[j] = any ? 1.0 : 0.0;
        }
    }
    return c;
}

Vector payoff_vector(const ReliabilityContext& ctx, const EpistemicPoint& e,
                     const Design& theta, int which) {
    Vector c(ctx.points.size(), 0.0);
    for (std::size_t j = 0; j < ctx.points.size(); ++j) {
        const double g = ctx.requirements(ctx.points[j], e, theta)[
            static_cast<std::size_t>(which)];
        c[j] = g >= 0.0 ? g : 0.0;
    }
    return c;
}

} // namespace

std::array<double, 2> failure_probability_range(
    const std::vector<EpistemicPoint>& eligible, const Design& theta,
    std::optional<int> which, const ReliabilityContext& ctx) {
    if (eligible.empty()) throw DomainError("no eligible points");
    double lo = 2.0, hi = -1.0;
    std::size_t usable = 0;
    for (const auto& e : eligible) {
        auto u = ctx.try_polytope(e);
        if (!u) {
            warn("skipping ineligible point with empty polytope");
            continue;
        }
        ++usable;
        const Vector c = indicator_vector(ctx, e, theta, which);
        lo = std::min(lo, bound_linear_functional(*u, c, false).value);
        hi = std::max(hi, bound_linear_functional(*u, c, true).value);
    }
    if (usable == 0) throw DomainError("every supplied point had an empty polytope");
    return {std::clamp(lo, 0.0, 1.0), std::clamp(hi, 0.0, 1.0)};
}

double severity(const std::vector<EpistemicPoint>& eligible, const Design& theta,
                int which, const ReliabilityContext& ctx) {
    if (eligible.empty()) throw DomainError("no eligible points");
    double worst = 0.0;
    std::size_t usable = 0;
    for (const auto& e : eligible) {
        auto u = ctx.try_polytope(e);
        if (!u) {
            warn("skipping ineligible point with empty polytope");
            continue;
        }
        ++usable;
        worst = std::max(worst,
                         bound_linear_functional(*u, payoff_vector(ctx, e, theta, which),
                                                 true)
                             .value);
    }
    if (usable == 0) throw DomainError("every supplied point had an empty polytope");
    return worst;
}

RminRmax rmin_rmax(const EpistemicPoint& e, const Design& theta, const WeightPolytope& u,
                   const ReliabilityContext& ctx) {
    const Vector c = indicator_vector(ctx, e, theta, std::nullopt);
    BoundResult lo = bound_linear_functional(u, c, false);
    BoundResult hi = bound_linear_functional(u, c, true);
    RminRmax out;
    out.r_min = std::clamp(lo.value, 0.0, 1.0);
    out.r_max = std::clamp(hi.value, 0.0, 1.0);
    out.w_min = std::move(lo.weights);
    return out;
}

std::vector<RealizationGroup> group_failing_points(
    const std::vector<AleatoryPoint>& points, const Vector& weights,
    const std::function<Vector(const AleatoryPoint&)>& requirements_at,
    double weight_cut) {
    if (points.size() != weights.size()) {
        throw DomainError("points/weights size mismatch");
    }
    std::map<std::vector<int>, RealizationGroup> groups;
    for (std::size_t j = 0; j < points.size(); ++j) {
        if (weights[j] <= weight_cut) continue;
        const Vector g = requirements_at(points[j]);
        std::vector<int> failing;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g[i] >= 0.0) failing.push_back(static_cast<int>(i));
        }
        if (failing.empty()) continue;
        auto& group = groups[failing];
        group.failing = failing;
        group.members.push_back(points[j]);
        group.weights.push_back(weights[j]);
    }
    std::vector<RealizationGroup> out;
    out.reserve(groups.size());
    for (auto& [key, group] : groups) out.push_back(std::move(group));
    return out;
}

std::vector<RealizationGroup> representative_realizations(
    const EpistemicPoint& e, const Design& theta, const WeightPolytope& u,
    const ReliabilityContext& ctx, double weight_cut, double notable_cut) {
    const RminRmax rr = rmin_rmax(e, theta, u, ctx);
    if (!(rr.r_min > notable_cut)) return {};
    return group_failing_points(
        u.points, rr.w_min,
        [&](const AleatoryPoint& a) { return ctx.requirements(a, e, theta); },
        weight_cut);
}

ReliabilityReport reliability_report(const std::vector<EpistemicPoint>& eligible,
                                     const Design& theta, const ReliabilityContext& ctx,
                                     int threads) {
    if (eligible.empty()) throw DomainError("no eligible points");
    const int req_count =
        static_cast<int>(ctx.requirements(ctx.points.front(), eligible.front(), theta)
                             .size());

    ReliabilityReport report;
    report.requirement_ranges.assign(static_cast<std::size_t>(req_count), {2.0, -1.0});
    report.severities.assign(static_cast<std::size_t>(req_count), 0.0);
    report.any_range = {2.0, -1.0};

    struct PerPoint {
        bool usable = false;
        std::vector<std::array<double, 2>> req;
        std::array<double, 2> any{0.0, 0.0};
        std::vector<double> sev;
        double r_min = 0.0, r_max = 0.0;
    };
    std::vector<PerPoint> partial(eligible.size());

    parallel_for(eligible.size(), threads, [&](std::size_t idx) {
        const auto& e = eligible[idx];
        auto u = ctx.try_polytope(e);
        if (!u) return;
        PerPoint p;
        p.usable = true;
        p.req.resize(static_cast<std::size_t>(req_count));
        p.sev.resize(static_cast<std::size_t>(req_count));
        for (int i = 0; i < req_count; ++i) {
            const Vector c = indicator_vector(ctx, e, theta, i);
            p.req[static_cast<std::size_t>(i)] = {
                std::clamp(bound_linear_functional(*u, c, false).value, 0.0, 1.0),
                std::clamp(bound_linear_functional(*u, c, true).value, 0.0, 1.0)};
            p.sev[static_cast<std::size_t>(i)] =
                std::max(0.0, bound_linear_functional(
                                  *u, payoff_vector(ctx, e, theta, i), true)
                                  .value);
        }
        const RminRmax rr = rmin_rmax(e, theta, *u, ctx);
        p.any = {rr.r_min, rr.r_max};
        p.r_min = rr.r_min;
        p.r_max = rr.r_max;
        partial[idx] = std::move(p);
    });

    for (std::size_t idx = 0; idx < eligible.size(); ++idx) {
        const auto& p = partial[idx];
        if (!p.usable) {
            ++report.skipped;
            continue;
        }
        for (int i = 0; i < req_count; ++i) {
            auto& range = report.requirement_ranges[static_cast<std::size_t>(i)];
            range[0] = std::min(range[0], p.req[static_cast<std::size_t>(i)][0]);
            range[1] = std::max(range[1], p.req[static_cast<std::size_t>(i)][1]);
            report.severities[static_cast<std::size_t>(i)] =
                std::max(report.severities[static_cast<std::size_t>(i)],
                         p.sev[static_cast<std::size_t>(i)]);
        }
        report.any_range[0] = std::min(report.any_range[0], p.any[0]);
        report.any_range[1] = std::max(report.any_range[1], p.any[1]);
        report.per_e.push_back({eligible[idx], p.r_min, p.r_max});
    }
    if (report.per_e.empty()) {
        throw DomainError("every supplied point had an empty polytope");
    }
    if (report.skipped > 0) {
        warn(std::to_string(report.skipped) +
             " point(s) skipped: empty polytope at the threshold");
    }
    return report;
}

} // namespace drocal
