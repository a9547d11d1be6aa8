#include "drocal/eligibility.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "drocal/errors.hpp"
#include "drocal/parallel.hpp"
#include "drocal/simplex.hpp"

namespace drocal {

BandLP build_lp(const Matrix& data_summaries, const Matrix& sim_summaries) {
    if (data_summaries.cols() != sim_summaries.cols()) {
        throw DomainError("data and simulation summaries disagree on dimension");
    }
    if (data_summaries.rows() == 0 || sim_summaries.rows() == 0) {
        throw DomainError("band LP needs at least one data and one simulation point");
    }
    for (double v : data_summaries.data()) {
        if (std::isnan(v)) throw DomainError("NaN in data summaries");
    }
    for (double v : sim_summaries.data()) {
        if (std::isnan(v)) throw DomainError("NaN in simulation summaries");
    }

    BandLP lp;
    lp.data_summaries = data_summaries;
    lp.sim_summaries = sim_summaries;
    lp.n1 = data_summaries.rows();
    lp.m = data_summaries.cols();
    lp.k = sim_summaries.rows();
    lp.sqrt_n1 = std::sqrt(static_cast<double>(lp.n1));

    lp.rows.reserve(lp.n1 * lp.m);
    lp.order.resize(lp.m);
    for (std::size_t v = 0; v < lp.m; ++v) {
        auto& ord = lp.order[v];
        ord.resize(lp.k);
        std::iota(ord.begin(), ord.end(), std::size_t{0});
        std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) {
            const double va = sim_summaries(a, v), vb = sim_summaries(b, v);
            return va < vb || (va == vb && a < b);
        });

        std::vector<double> coord_data(lp.n1);
        for (std::size_t i = 0; i < lp.n1; ++i) coord_data[i] = data_summaries(i, v);
        const EmpiricalCdf ecdf(coord_data);

        // sorted sim values for prefix counting
        std::vector<double> sim_sorted(lp.k);
        for (std::size_t j = 0; j < lp.k; ++j) sim_sorted[j] = sim_summaries(ord[j], v);

        for (std::size_t i = 0; i < lp.n1; ++i) {
            const double s = data_summaries(i, v);
            BandLP::RowPair row;
            row.coord = v;
            row.data_index = i;
            row.prefix = static_cast<std::size_t>(
                std::upper_bound(sim_sorted.begin(), sim_sorted.end(), s) -
                sim_sorted.begin());
            row.lo = ecdf.at(s);   // right limit F(s+)
            row.hi = ecdf.left(s); // left limit F(s-)
            lp.rows.push_back(row);
        }
    }
    return lp;
}

std::vector<MergedBandRow> merged_band_rows(const BandLP& lp) {
    std::map<std::pair<std::size_t, std::size_t>, MergedBandRow> merged;
    for (const auto& row : lp.rows) {
        auto key = std::make_pair(row.coord, row.prefix);
        auto it = merged.find(key);
        if (it == merged.end()) {
            merged.emplace(key, MergedBandRow{row.coord, row.prefix, row.lo, row.hi});
        } else {
            it->second.lo = std::max(it->second.lo, row.lo);
            it->second.hi = std::min(it->second.hi, row.hi);
        }
    }
    std::vector<MergedBandRow> out;
    out.reserve(merged.size());
    for (const auto& [key, row] : merged) out.push_back(row);
    return out;
}

namespace {

Vector prefix_row(const BandLP& lp, const MergedBandRow& row, std::size_t num_vars,
                  double q_coeff) {
    Vector coeffs(num_vars, 0.0);
    const auto& ord = lp.order[row.coord];
    for (std::size_t t = 0; t < row.prefix; ++t) coeffs[ord[t]] = 1.0;
    if (q_coeff != 0.0) coeffs[num_vars - 1] = q_coeff;
    return coeffs;
}

} // namespace

QStarResult solve_q_star(const BandLP& lp) {
    const std::size_t nv = lp.k + 1; // W_0..W_{k-1}, q
    const double band_coeff = 1.0 / lp.sqrt_n1;

    LinearProgram prog(nv);
    for (const auto& row : merged_band_rows(lp)) {
        // G + q/sqrt(n1) >= lo
        prog.add_row(prefix_row(lp, row, nv, band_coeff), RowSense::GreaterEq, row.lo);
        // G - q/sqrt(n1) <= hi
        prog.add_row(prefix_row(lp, row, nv, -band_coeff), RowSense::LessEq, row.hi);
    }
    Vector simplex_row(nv, 1.0);
    simplex_row[nv - 1] = 0.0;
    prog.add_row(std::move(simplex_row), RowSense::Equal, 1.0);

    Vector objective(nv, 0.0);
    objective[nv - 1] = 1.0;
    prog.set_objective(std::move(objective), /*maximize=*/false);

    LpSolution sol = prog.solve();
    if (sol.status != LpStatus::Optimal) {
        throw SolverError("band LP did not reach an optimum (status " +
                          std::to_string(static_cast<int>(sol.status)) + ")");
    }

    QStarResult result;
    result.q_star = sol.value;
    result.iterations = sol.iterations;
    result.weights.assign(sol.x.begin(), sol.x.begin() + static_cast<long>(lp.k));
    double total = 0.0;
    for (double& w : result.weights) {
        if (w < -1e-10) throw SolverError("band LP returned a negative weight");
        if (w < 0.0) w = 0.0;
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-8) {
        throw SolverError("band LP weight witness is off the simplex");
    }
    return result;
}

bool check_feasible(const BandLP& lp, double q) {
    if (!(q >= 0.0)) return false;
    const double eta = q / lp.sqrt_n1;

    LinearProgram prog(lp.k);
    for (const auto& row : merged_band_rows(lp)) {
        const double lo = row.lo - eta;
        const double hi = row.hi + eta;
        Vector coeffs(lp.k, 0.0);
        const auto& ord = lp.order[row.coord];
        for (std::size_t t = 0; t < row.prefix; ++t) coeffs[ord[t]] = 1.0;
        if (lo > 0.0) prog.add_row(coeffs, RowSense::GreaterEq, lo);
        if (hi < 1.0) prog.add_row(std::move(coeffs), RowSense::LessEq, hi);
    }
    prog.add_row(Vector(lp.k, 1.0), RowSense::Equal, 1.0);
    prog.set_objective(Vector(lp.k, 0.0), true);
    return prog.solve().status == LpStatus::Optimal;
}

Matrix sim_summaries_at(const Simulator& sim, const std::vector<AleatoryPoint>& points,
                        const EpistemicPoint& e, const SummarySpec& spec, int steps,
                        double dt) {
    Matrix out(points.size(), spec.dimension());
    for (std::size_t j = 0; j < points.size(); ++j) {
        const Trajectory traj = sim.run(points[j], e, std::nullopt, steps, dt);
        const Vector s = summarize(traj, spec);
        for (std::size_t v = 0; v < s.size(); ++v) out(j, v) = s[v];
    }
    return out;
}

QStarResult qstar_for_point(const Simulator& sim, const Matrix& data_summaries,
                            const std::vector<AleatoryPoint>& points,
                            const EpistemicPoint& e, const SummarySpec& spec, int steps,
                            double dt) {
    const Matrix sims = sim_summaries_at(sim, points, e, spec, steps, dt);
    return solve_q_star(build_lp(data_summaries, sims));
}

std::size_t EligibilitySet::eligible_count() const {
    std::size_t count = 0;
    for (const auto& r : records) count += r.eligible ? 1 : 0;
    return count;
}

std::vector<const EligibilityRecord*> EligibilitySet::eligible_records() const {
    std::vector<const EligibilityRecord*> out;
    for (const auto& r : records) {
        if (r.eligible) out.push_back(&r);
    }
    return out;
}

EligibilitySet construct_eligibility_set(const Simulator& sim,
                                         const std::vector<Trajectory>& data,
                                         const SummarySpec& spec,
                                         const KSThreshold& thr,
                                         const EligibilityConfig& cfg) {
    if (data.empty()) throw DomainError("no data trajectories");
    if (cfg.n2 == 0 || cfg.k == 0) throw DomainError("n2 and k must be at least 1");
    if (cfg.k < data.size()) {
        throw DomainError("k must be at least n1 for the sampled band constraints");
    }
    if (cfg.k < 10 * data.size()) {
        warn("k = " + std::to_string(cfg.k) + " is small relative to n1 = " +
             std::to_string(data.size()) + "; the coverage guarantee wants k >> n1");
    }

    const Matrix data_summaries = summarize_all(data, spec);
    const SeedKey key = root_key(cfg.seed);
    const auto e_raw = sample_uniform_box(cfg.box_e, cfg.n2, key.child("e-sample"));

    std::vector<AleatoryPoint> shared_sample;
    if (!cfg.resample_per_e) {
        for (auto& p : sample_uniform_box(cfg.box_a, cfg.k, key.child("a-sample"))) {
            shared_sample.push_back(AleatoryPoint{std::move(p)});
        }
    }

    EligibilitySet set;
    set.threshold = thr;
    set.box_e = cfg.box_e;
    set.provenance = Provenance{cfg.seed, data.size(), cfg.n2, cfg.k, spec.hash(),
                                cfg.resample_per_e};
    set.records.resize(cfg.n2);

    parallel_for(cfg.n2, cfg.threads, [&](std::size_t l) {
        const EpistemicPoint e{e_raw[l]};
        try {
            const std::vector<AleatoryPoint>* points = &shared_sample;
            std::vector<AleatoryPoint> own;
            if (cfg.resample_per_e) {
                for (auto& p : sample_uniform_box(cfg.box_a, cfg.k,
                                                  key.child("a-sample").child(l))) {
                    own.push_back(AleatoryPoint{std::move(p)});
                }
                points = &own;
            }
            QStarResult q = qstar_for_point(sim, data_summaries, *points, e, spec,
                                            cfg.steps, cfg.dt);
            set.records[l] = EligibilityRecord{e, q.q_star, std::move(q.weights),
                                               q.q_star <= thr.q};
        } catch (const ProtocolError& ex) {
            throw ProtocolError("eligibility record " + std::to_string(l) + " failed: " +
                                ex.what());
        } catch (const TransportError& ex) {
            throw TransportError("eligibility record " + std::to_string(l) + " failed: " +
                                 ex.what());
        } catch (const std::exception& ex) {
            throw SolverError("eligibility record " + std::to_string(l) +
                              " failed: " + ex.what());
        }
    });
    return set;
}

namespace {

double percentile(std::vector<double> sorted, double p) {
    // linear interpolation between order statistics
    if (sorted.empty()) throw DomainError("percentile of empty sample");
    if (sorted.size() == 1) return sorted[0];
    const double pos = p / 100.0 * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

} // namespace

std::vector<RankingEntry> rank_parameters(const EligibilitySet& set) {
    const auto eligible = set.eligible_records();
    if (eligible.empty()) {
        throw DomainError("cannot rank parameters with an empty eligible set");
    }
    const std::size_t dims = set.box_e.dim();
    std::vector<RankingEntry> ranking(dims);
    for (std::size_t d = 0; d < dims; ++d) {
        std::vector<double> values;
        values.reserve(eligible.size());
        for (const auto* rec : eligible) values.push_back(rec->e.e[d]);
        std::sort(values.begin(), values.end());
        const double span = percentile(values, 97.5) - percentile(values, 2.5);
        ranking[d] = RankingEntry{d, 1.0 - span / set.box_e.width(d)};
    }
    std::sort(ranking.begin(), ranking.end(), [](const auto& a, const auto& b) {
        return a.score > b.score || (a.score == b.score && a.dim < b.dim);
    });
    return ranking;
}

ReducedSet reduce_set(const EligibilitySet& set, double r_percent) {
    if (!(r_percent >= 0.0 && r_percent < 100.0)) {
        throw DomainError("risk level must lie in [0, 100)");
    }
    std::vector<const EligibilityRecord*> eligible = set.eligible_records();
    if (eligible.empty()) throw DomainError("cannot reduce an empty eligible set");

    std::stable_sort(eligible.begin(), eligible.end(),
                     [](const auto* a, const auto* b) { return a->q_star < b->q_star; });
    const std::size_t keep = static_cast<std::size_t>(std::ceil(
        (1.0 - r_percent / 100.0) * static_cast<double>(eligible.size())));

    ReducedSet out;
    out.set.threshold = set.threshold;
    out.set.provenance = set.provenance;
    out.set.box_e = set.box_e;
    out.set.records.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) out.set.records.push_back(*eligible[i]);
    out.q_r = out.set.records.empty() ? 0.0 : out.set.records.back().q_star;
    out.alpha_tilde =
        static_cast<double>(set.threshold.m) * (1.0 - kolmogorov_cdf(out.q_r));
    return out;
}

std::vector<SubsampleRow> subsample_study(const Simulator& sim,
                                          const std::vector<Trajectory>& data,
                                          const std::vector<std::size_t>& sizes,
                                          std::size_t replications, double alpha,
                                          const SummarySpec& spec,
                                          const EligibilityConfig& cfg) {
    if (replications == 0) throw DomainError("need at least one replication");
    const SeedKey pick_key = root_key(cfg.seed).child("subsample");

    std::vector<SubsampleRow> table;
    for (const std::size_t size : sizes) {
        if (size == 0 || size > data.size()) {
            throw DomainError("subsample size must lie in [1, n1]");
        }
        double total_fraction = 0.0;
        for (std::size_t rep = 0; rep < replications; ++rep) {
            // partial Fisher-Yates draw of `size` indices without replacement
            std::vector<std::size_t> idx(data.size());
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            Stream stream(pick_key.child(size).child(rep));
            for (std::size_t i = 0; i < size; ++i) {
                const std::size_t j =
                    i + static_cast<std::size_t>(stream.next_double() *
                                                 static_cast<double>(idx.size() - i));
                std::swap(idx[i], idx[j]);
            }
            std::vector<Trajectory> subset;
            subset.reserve(size);
            for (std::size_t i = 0; i < size; ++i) subset.push_back(data[idx[i]]);

            const KSThreshold thr =
                threshold(alpha, static_cast<int>(spec.dimension()), static_cast<int>(size));
            const EligibilitySet set =
                construct_eligibility_set(sim, subset, spec, thr, cfg);
            total_fraction += static_cast<double>(set.eligible_count()) /
                              static_cast<double>(set.records.size());
        }
        table.push_back(
            SubsampleRow{size, total_fraction / static_cast<double>(replications)});
    }
    return table;
}

} // namespace drocal
