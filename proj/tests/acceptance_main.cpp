// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavier Monte Carlo checks print their measured statistics so a
// failure is diagnosable from the log alone.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "drocal/aleatory.hpp"
#include "drocal/design.hpp"
#include "drocal/eligibility.hpp"
#include "drocal/errors.hpp"
#include "drocal/io.hpp"
#include "drocal/ksstat.hpp"
#include "drocal/model.hpp"
#include "drocal/rng.hpp"
#include "drocal/summary.hpp"

using namespace drocal;
namespace fs = std::filesystem;

namespace {

int failures = 0;

struct Criterion {
    const char* id;
    const char* label;
    double budget_s; // 0 = no stated runtime bound
    std::function<bool()> body;
};

void run_criterion(const Criterion& c) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string error;
    try {
        ok = c.body();
    } catch (const std::exception& ex) {
        error = ex.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (ok && c.budget_s > 0.0 && secs > c.budget_s) {
        ok = false;
        error = "exceeded the stated runtime bound";
    }
    if (!ok) ++failures;
    std::printf("[%s] %s: %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", c.id, c.label, secs,
                error.empty() ? "" : " error: ", error.c_str());
    std::fflush(stdout);
}

Matrix make_matrix(const std::vector<Vector>& rows) {
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

// 0.02-step simplex grid search over weights, m = 1 instances
double grid_qstar(const BandLP& lp, int units = 50) {
    const double step = 1.0 / units;
    Vector w(lp.k, 0.0);
    double best = 1e100;
    std::function<void(std::size_t, int)> rec = [&](std::size_t slot, int left) {
        if (slot + 1 == lp.k) {
            w[slot] = left * step;
            double needed = 0.0;
            for (const auto& row : lp.rows) {
                double g = 0.0;
                for (std::size_t j = 0; j < lp.k; ++j) {
                    if (lp.indicator(row.coord, row.data_index, j)) g += w[j];
                }
                needed = std::max(needed, (row.lo - g) * lp.sqrt_n1);
                needed = std::max(needed, (g - row.hi) * lp.sqrt_n1);
            }
            best = std::min(best, needed);
            return;
        }
        for (int take = 0; take <= left; ++take) {
            w[slot] = take * step;
            rec(slot + 1, left - take);
        }
    };
    rec(0, units);
    return best;
}

// shared benchmark state for the heavy criteria, built once
struct BenchmarkRun {
    OscBenchmark bench;
    SyntheticTruth truth = osc_truth();
    SummarySpec spec = default_summary_spec(1, 0.1);
    KSThreshold thr_50 = threshold(0.05, 12, 50);
    std::vector<Trajectory> data_50; // seed-0 data set reused by C6
    EligibilitySet set_200;          // full n2=200 construction on the seed-0 data

    BenchmarkRun() {
        const SeedKey key = root_key(3000);
        for (const auto& a : sample_truth(truth, 50, key.child("data"))) {
            data_50.push_back(bench.run(a, truth.e_true, std::nullopt, 127, 0.1));
        }
        EligibilityConfig cfg;
        cfg.box_e = bench.box_e;
        cfg.box_a = bench.box_a;
        cfg.n2 = 200;
        cfg.k = 500;
        cfg.steps = 127;
        cfg.dt = 0.1;
        cfg.seed = 3000;
        cfg.threads = 1;
        set_200 = construct_eligibility_set(bench, data_50, spec, thr_50, cfg);
    }
};

BenchmarkRun* bench_run = nullptr;

std::string sh(const std::string& cmd) { return cmd + " >/dev/null 2>&1"; }

} // namespace

int main() {
    set_warnings_enabled(false);

    // ---------------------------------------------------------------- C1
    run_criterion({"C1", "Kolmogorov quantiles reproduce the tabulated values", 1.0, [] {
        const double q12 = kolmogorov_quantile(1.0 - 0.05 / 12.0);
        const double q32 = kolmogorov_quantile(1.0 - 0.05 / 32.0);
        std::printf("       q(1-0.05/12) = %.4f, q(1-0.05/32) = %.4f\n", q12, q32);
        return std::abs(q12 - 1.76) <= 0.005 && std::abs(q32 - 1.89) <= 0.005;
    }});

    // ---------------------------------------------------------------- C2
    run_criterion({"C2", "risk-table confidence mapping at m = 32", 1.0, [] {
        const double conf_189 = 1.0 - 32.0 * (1.0 - kolmogorov_cdf(1.89));
        const double conf_1879 = 1.0 - 32.0 * (1.0 - kolmogorov_cdf(1.879));
        std::printf("       1-alpha~(1.89) = %.4f, 1-alpha~(1.879) = %.4f\n", conf_189,
                    conf_1879);
        return std::abs(conf_189 - 0.95) <= 0.002 && std::abs(conf_1879 - 0.946) <= 0.002;
    }});

    // ---------------------------------------------------------------- C3
    run_criterion({"C3", "analytic band-LP optima", 0.0, [] {
        const double q_coincident =
            solve_q_star(build_lp(make_matrix({{5.0}}), make_matrix({{5.0}}))).q_star;
        const double q_straddle =
            solve_q_star(build_lp(make_matrix({{5.0}}), make_matrix({{4.0}, {6.0}})))
                .q_star;
        const double q_below =
            solve_q_star(
                build_lp(make_matrix({{5.0}}), make_matrix({{1.0}, {2.0}, {3.0}})))
                .q_star;
        std::printf("       q* = %.8f / %.8f / %.8f\n", q_coincident, q_straddle, q_below);
        return std::abs(q_coincident - 1.0) <= 1e-6 && std::abs(q_straddle - 0.5) <= 1e-6 &&
               std::abs(q_below - 1.0) <= 1e-6;
    }});

    // ---------------------------------------------------------------- C4
    run_criterion({"C4", "LP matches the 0.02-grid oracle on 50 random instances", 60.0, [] {
        SeedKey key = root_key(1618);
        double worst = 0.0;
        for (std::uint64_t trial = 0; trial < 50; ++trial) {
            Stream s = stream_at(key, trial);
            const std::size_t n1 = 1 + static_cast<std::size_t>(s.next_double() * 3);
            const std::size_t k = 2 + static_cast<std::size_t>(s.next_double() * 5);
            std::vector<Vector> data(n1, Vector(1)), sims(k, Vector(1));
            for (auto& row : data) row[0] = s.next_uniform(0, 4);
            for (auto& row : sims) row[0] = s.next_uniform(0, 4);
            const BandLP lp = build_lp(make_matrix(data), make_matrix(sims));
            const double lp_q = solve_q_star(lp).q_star;
            const double grid_q = grid_qstar(lp);
            worst = std::max(worst, std::abs(lp_q - grid_q));
            if (grid_q < lp_q - 1e-7) return false; // grid must not beat the LP
        }
        std::printf("       worst |LP - grid| = %.4f\n", worst);
        return worst <= 0.02;
    }});

    bench_run = new BenchmarkRun();

    // ---------------------------------------------------------------- C5
    run_criterion({"C5", "e_true coverage over 100 replications (n1=50, k=500)", 0.0, [] {
        auto& br = *bench_run;
        int eligible = 0;
        for (int rep = 0; rep < 100; ++rep) {
            const SeedKey key = root_key(3000 + static_cast<std::uint64_t>(rep));
            std::vector<Trajectory> data;
            for (const auto& a : sample_truth(br.truth, 50, key.child("data"))) {
                data.push_back(br.bench.run(a, br.truth.e_true, std::nullopt, 127, 0.1));
            }
            const Matrix data_summaries = summarize_all(data, br.spec);
            std::vector<AleatoryPoint> sample;
            for (auto& p :
                 sample_uniform_box(br.bench.box_a, 500, key.child("a-sample"))) {
                sample.push_back(AleatoryPoint{std::move(p)});
            }
            const auto r = qstar_for_point(br.bench, data_summaries, sample,
                                           br.truth.e_true, br.spec, 127, 0.1);
            if (r.q_star <= br.thr_50.q) ++eligible;
        }
        std::printf("       e_true eligible in %d/100 replications (need >= 90); "
                    "full n2=200 construction flagged %zu/200 sampled points\n",
                    eligible, br.set_200.eligible_count());
        return eligible >= 90;
    }});

    // ---------------------------------------------------------------- C6
    run_criterion({"C6", "qualitative structure: e4 ranked last, fraction vs n1", 0.0, [] {
        auto& br = *bench_run;
        const auto ranking = rank_parameters(br.set_200);
        std::printf("       ranking:");
        for (const auto& r : ranking) {
            std::printf(" e%zu(%.3f)", r.dim + 1, r.score);
        }
        std::printf("\n");
        if (ranking.back().dim != 3) return false; // e4 must be last

        EligibilityConfig cfg;
        cfg.box_e = br.bench.box_e;
        cfg.box_a = br.bench.box_a;
        cfg.n2 = 100;
        cfg.k = 500;
        cfg.steps = 127;
        cfg.dt = 0.1;
        cfg.seed = 3000;
        cfg.threads = 1;
        const auto table =
            subsample_study(br.bench, br.data_50, {10, 25, 50}, 3, 0.05, br.spec, cfg);
        std::printf("       eligible fraction:");
        for (const auto& row : table) {
            std::printf(" n1=%zu: %.3f", row.size, row.mean_eligible_fraction);
        }
        std::printf("\n");
        for (std::size_t i = 1; i < table.size(); ++i) {
            if (table[i].mean_eligible_fraction >
                table[i - 1].mean_eligible_fraction + 0.05) {
                return false;
            }
        }
        return true;
    }});

    // ---------------------------------------------------------------- C7
    run_criterion({"C7", "invariant suite", 0.0, [] {
        SeedKey key = root_key(777);
        // q* lower bound + feasibility monotone + dimension monotonicity
        for (std::uint64_t trial = 0; trial < 25; ++trial) {
            Stream s = stream_at(key, trial);
            const std::size_t n1 = 1 + static_cast<std::size_t>(s.next_double() * 4);
            const std::size_t k = 2 + static_cast<std::size_t>(s.next_double() * 6);
            std::vector<Vector> data1(n1, Vector(1)), data2(n1, Vector(2));
            std::vector<Vector> sims1(k, Vector(1)), sims2(k, Vector(2));
            for (std::size_t i = 0; i < n1; ++i) {
                data1[i][0] = data2[i][0] = s.next_uniform(0, 4);
                data2[i][1] = s.next_uniform(0, 4);
            }
            for (std::size_t j = 0; j < k; ++j) {
                sims1[j][0] = sims2[j][0] = s.next_uniform(0, 4);
                sims2[j][1] = s.next_uniform(0, 4);
            }
            const BandLP lp1 = build_lp(make_matrix(data1), make_matrix(sims1));
            const BandLP lp2 = build_lp(make_matrix(data2), make_matrix(sims2));
            const double q1 = solve_q_star(lp1).q_star;
            const double q2 = solve_q_star(lp2).q_star;
            if (q1 < 0.5 / std::sqrt(static_cast<double>(n1)) - 1e-9) return false;
            if (q2 < q1 - 1e-7) return false;
            if (!check_feasible(lp1, q1 + 1e-9)) return false;
            if (!check_feasible(lp1, q1 + 0.5)) return false;
            if (check_feasible(lp1, q1 - 0.01)) return false;
        }

        // aleatory range nesting in q
        {
            Stream s = stream_at(key, 1000);
            std::vector<Vector> data(3, Vector(1)), sims(8, Vector(1));
            for (auto& r : data) r[0] = s.next_uniform(0, 3);
            for (auto& r : sims) r[0] = s.next_uniform(0, 3);
            std::vector<AleatoryPoint> pts;
            for (const auto& r : sims) pts.push_back(AleatoryPoint{{r[0]}});
            const BandLP lp = build_lp(make_matrix(data), make_matrix(sims));
            const double q0 = solve_q_star(lp).q_star;
            KSThreshold thr;
            thr.q = q0 + 0.05;
            thr.m = 1;
            thr.n1 = 3;
            thr.band = thr.q / std::sqrt(3.0);
            KSThreshold wide = thr;
            wide.q = q0 + 0.4;
            const auto u1 = make_polytope(make_matrix(data), make_matrix(sims), pts, thr);
            const auto u2 = make_polytope(make_matrix(data), make_matrix(sims), pts, wide);
            Vector c(8);
            for (auto& v : c) v = s.next_double();
            if (bound_linear_functional(u2, c, false).value >
                bound_linear_functional(u1, c, false).value + 1e-7) {
                return false;
            }
            if (bound_linear_functional(u2, c, true).value <
                bound_linear_functional(u1, c, true).value - 1e-7) {
                return false;
            }
        }

        // Parseval + amplitude equivariance on benchmark trajectories
        {
            auto& br = *bench_run;
            Trajectory traj = br.data_50.front();
            const auto dft = dft_coefficients(traj, 0);
            double te = 0.0, fe = 0.0;
            for (double v : traj.channels[0]) te += v * v;
            te /= static_cast<double>(traj.length());
            for (const auto& cc : dft.coefficients) fe += std::norm(cc);
            if (std::abs(te - fe) > 1e-9) return false;

            const Vector base = summarize(traj, br.spec);
            for (auto& v : traj.channels[0]) v *= 3.0;
            const Vector scaled = summarize(traj, br.spec);
            for (std::size_t i = 0; i < base.size(); i += 2) {
                if (std::abs(scaled[i] - 3.0 * base[i]) > 1e-9) return false;
                if (scaled[i + 1] != base[i + 1]) return false;
            }
        }

        // Bonferroni monotonicity
        double prev = 0.0;
        for (int m : {1, 2, 4, 8, 16, 32, 64}) {
            const double q = threshold(0.05, m, 50).q;
            if (q < prev) return false;
            prev = q;
        }
        prev = 1e9;
        for (double alpha : {0.01, 0.02, 0.05, 0.1, 0.2}) {
            const double q = threshold(alpha, 12, 50).q;
            if (q > prev) return false;
            prev = q;
        }
        return true;
    }});

    // ---------------------------------------------------------------- C8
    run_criterion({"C8", "KW optimizer: quadratic oracle + benchmark improvement", 0.0, [] {
        // deterministic quadratic oracle with the stated settings
        const Design baseline{{1.0, 0.6, 1.5}};
        Vector target(3);
        for (std::size_t d = 0; d < 3; ++d) target[d] = 0.8 * baseline.theta[d];
        auto quad = [&](const Design& theta, SeedKey) {
            double s = 0.0;
            for (std::size_t d = 0; d < 3; ++d) {
                s += (theta.theta[d] - target[d]) * (theta.theta[d] - target[d]);
            }
            return s;
        };
        KWParams params; // c0 = a0 = 0.1, n_max = 8
        const KWResult quad_result = kw_optimize(baseline, params, quad, root_key(21));
        if (!(quad_result.trace.final_objective < quad_result.trace.initial_objective)) {
            return false;
        }
        double nrm = 0.0;
        for (double v : baseline.theta) nrm += v * v;
        nrm = std::sqrt(nrm);
        for (std::size_t d = 0; d < 3; ++d) {
            if (std::abs(quad_result.theta_new.theta[d] - target[d]) > 0.15 * nrm) {
                return false;
            }
        }

        // benchmark improvement: theta_new no worse than baseline + 0.02
        auto& br = *bench_run;
        std::vector<EpistemicPoint> eligible;
        {
            auto recs = br.set_200.eligible_records();
            std::stable_sort(recs.begin(), recs.end(), [](const auto* a, const auto* b) {
                return a->q_star < b->q_star;
            });
            for (std::size_t i = 0; i < recs.size() && i < 10; ++i) {
                eligible.push_back(recs[i]->e);
            }
        }
        if (eligible.empty()) return false;

        RobustObjectiveContext ctx;
        ctx.sim = &br.bench;
        ctx.data_summaries = summarize_all(br.data_50, br.spec);
        ctx.spec = br.spec;
        ctx.thr = br.thr_50;
        ctx.box_a = br.bench.box_a;
        ctx.k = 250;
        ctx.steps = 127;
        ctx.dt = 0.1;
        ctx.threads = 1;

        const Design theta0{{1.4, 0.9}};
        const SeedKey key = root_key(22).child("kw");
        const KWResult r =
            kw_optimize(theta0, params, make_robust_objective(eligible, ctx), key);
        // common evaluation sample for the comparison
        const double v0 = robust_objective(theta0, eligible, ctx, key.child("compare"));
        const double v1 =
            robust_objective(r.theta_new, eligible, ctx, key.child("compare"));
        std::printf("       quadratic: %.4f -> %.4f; benchmark objective: %.4f -> %.4f\n",
                    quad_result.trace.initial_objective,
                    quad_result.trace.final_objective, v0, v1);
        return v1 <= v0 + 0.02;
    }});

    // ---------------------------------------------------------------- C9
    run_criterion({"C9", "CLI reruns are byte-identical", 0.0, [] {
        const char* cli = std::getenv("DROCAL_BIN");
        if (cli == nullptr) {
            std::printf("       DROCAL_BIN not set\n");
            return false;
        }
        const fs::path tmp =
            fs::temp_directory_path() / ("drocal_acc_" + std::to_string(::getpid()));
        fs::remove_all(tmp);
        fs::create_directories(tmp);
        const fs::path cfg = tmp / "cfg.json";
        write_text_file(cfg, R"({
  "seed": 77, "n1": 12, "n2": 16, "k": 130,
  "theta_baseline": [0.6, 0.3],
  "kw": {"n_max": 2, "e_cap": 3},
  "risk_levels": [0, 10]
})");
        const std::string base = std::string(cli) + " ";
        const std::string a = (tmp / "a").string(), b = (tmp / "b").string();
        // generate + calibrate into both roots (calibrate always reads a/data
        // so both runs see identical inputs)
        for (const std::string& root : {a, b}) {
            if (std::system(sh(base + "generate -c " + cfg.string() + " -o " + root)
                                .c_str()) != 0) {
                return false;
            }
        }
        for (const std::string& root : {a, b}) {
            if (std::system(sh(base + "calibrate -c " + cfg.string() + " -d " + a +
                               "/data -o " + root)
                                .c_str()) != 0) {
                return false;
            }
        }
        const std::string elig = a + "/eligibility.json";
        for (const std::string& root : {a, b}) {
            if (std::system(sh(base + "rank --eligibility " + elig + " -o " + root)
                                .c_str()) != 0 ||
                std::system(sh(base + "subsample -c " + cfg.string() + " -d " + a +
                               "/data --sizes 3,12 --reps 2 -o " + root)
                                .c_str()) != 0 ||
                std::system(sh(base + "reliability --eligibility " + elig + " -o " + root)
                                .c_str()) != 0 ||
                std::system(sh(base + "design --eligibility " + elig + " -o " + root)
                                .c_str()) != 0 ||
                std::system(sh(base + "risk --eligibility " + elig + " -o " + root)
                                .c_str()) != 0) {
                return false;
            }
        }
        const std::vector<std::string> outputs = {
            "data_summaries.csv", "eligibility.json", "qstar_vs_e.csv", "ranking.csv",
            "subsample.csv",      "reliability.json", "rminmax.csv",    "design.json",
            "kw_trace.csv",       "risk.csv"};
        for (const auto& name : outputs) {
            if (read_text_file(a + "/" + name) != read_text_file(b + "/" + name)) {
                std::printf("       mismatch in %s\n", name.c_str());
                return false;
            }
        }
        for (std::size_t i = 0; i < 12; ++i) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "data/traj_%04zu.csv", i);
            if (read_text_file(a + "/" + buf) != read_text_file(b + "/" + buf)) {
                return false;
            }
        }
        fs::remove_all(tmp);
        return true;
    }});

    delete bench_run;
    std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "SUCCESS" : "FAILURE",
                failures);
    return failures == 0 ? 0 : 1;
}
