#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "drocal/eligibility.hpp"
#include "drocal/errors.hpp"
#include "drocal/ksstat.hpp"
#include "drocal/model.hpp"
#include "drocal/rng.hpp"

using namespace drocal;

namespace {

Matrix make_matrix(const std::vector<Vector>& rows) {
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

// exhaustive search over simplex weight vectors on a 0.02 grid; the
// independent oracle for small instances
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

} // namespace

TEST_CASE("band LP construction counts") {
    SUBCASE("one data point, one coordinate") {
        const BandLP lp = build_lp(make_matrix({{1.0}}), make_matrix({{1.0}}));
        CHECK(lp.rows.size() == 1);
        CHECK(lp.band_row_count() == 2);
        CHECK(lp.rows[0].lo == doctest::Approx(1.0)); // F(s+)
        CHECK(lp.rows[0].hi == doctest::Approx(0.0)); // F(s-)
    }
    SUBCASE("duplicate data values still emit one pair per data index") {
        const BandLP lp =
            build_lp(make_matrix({{2.0}, {2.0}, {3.0}}), make_matrix({{1.0}, {2.5}}));
        CHECK(lp.rows.size() == 3);
        CHECK(lp.band_row_count() == 6);
        // both duplicates carry the same merged-breakpoint limits
        CHECK(lp.rows[0].lo == doctest::Approx(2.0 / 3.0));
        CHECK(lp.rows[0].hi == doctest::Approx(0.0));
        CHECK(lp.rows[1].lo == doctest::Approx(2.0 / 3.0));
    }
    SUBCASE("sim point below all data points gives an all-ones column") {
        const BandLP lp =
            build_lp(make_matrix({{1.0}, {2.0}, {3.0}}), make_matrix({{0.5}}));
        for (std::size_t i = 0; i < 3; ++i) CHECK(lp.indicator(0, i, 0));
    }
    SUBCASE("NaN summaries are rejected") {
        CHECK_THROWS_AS(build_lp(make_matrix({{std::nan("")}}), make_matrix({{1.0}})),
                        DomainError);
    }
}

TEST_CASE("analytic band LP optima") {
    SUBCASE("coincident one-atom case: q* = 1") {
        const BandLP lp = build_lp(make_matrix({{5.0}}), make_matrix({{5.0}}));
        const auto r = solve_q_star(lp);
        CHECK(std::abs(r.q_star - 1.0) < 1e-6);
    }
    SUBCASE("straddling two-atom case: q* = 0.5") {
        const BandLP lp = build_lp(make_matrix({{5.0}}), make_matrix({{4.0}, {6.0}}));
        const auto r = solve_q_star(lp);
        CHECK(std::abs(r.q_star - 0.5) < 1e-6);
        CHECK(r.weights[0] == doctest::Approx(0.5).epsilon(1e-6));
    }
    SUBCASE("all sim mass strictly below the data point: q* = 1") {
        const BandLP lp =
            build_lp(make_matrix({{5.0}}), make_matrix({{1.0}, {2.0}, {3.0}}));
        const auto r = solve_q_star(lp);
        CHECK(std::abs(r.q_star - 1.0) < 1e-6);
    }
}

TEST_CASE("interleaved sim points attain the 1/(2 sqrt(n1)) lower bound") {
    const BandLP lp = build_lp(make_matrix({{1.0}, {3.0}}),
                               make_matrix({{0.0}, {2.0}, {4.0}}));
    const auto r = solve_q_star(lp);
    CHECK(r.q_star == doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("q* lower bound holds on random instances") {
    SeedKey key = root_key(314);
    for (std::uint64_t trial = 0; trial < 40; ++trial) {
        Stream s = stream_at(key, trial);
        const std::size_t n1 = 1 + static_cast<std::size_t>(s.next_double() * 4);
        const std::size_t k = 1 + static_cast<std::size_t>(s.next_double() * 6);
        const std::size_t m = 1 + static_cast<std::size_t>(s.next_double() * 2);
        std::vector<Vector> data(n1, Vector(m));
        std::vector<Vector> sims(k, Vector(m));
        for (auto& row : data)
            for (auto& v : row) v = std::round(s.next_double() * 10) / 2.0;
        for (auto& row : sims)
            for (auto& v : row) v = std::round(s.next_double() * 10) / 2.0;
        const BandLP lp = build_lp(make_matrix(data), make_matrix(sims));
        const auto r = solve_q_star(lp);
        CHECK(r.q_star >= 0.5 / std::sqrt(static_cast<double>(n1)) - 1e-9);

        // witness satisfies every row at q = q*
        const double eta = r.q_star / lp.sqrt_n1;
        for (const auto& row : lp.rows) {
            double g = 0.0;
            for (std::size_t j = 0; j < lp.k; ++j) {
                if (lp.indicator(row.coord, row.data_index, j)) g += r.weights[j];
            }
            CHECK(g >= row.lo - eta - 1e-6);
            CHECK(g <= row.hi + eta + 1e-6);
        }
    }
}

TEST_CASE("feasibility is monotone in q and matches q*") {
    const BandLP lp = build_lp(make_matrix({{1.0}, {2.5}, {4.0}}),
                               make_matrix({{0.5}, {1.5}, {3.0}, {4.5}}));
    const auto r = solve_q_star(lp);
    CHECK(check_feasible(lp, r.q_star)); // boundary counts as feasible
    CHECK(check_feasible(lp, r.q_star + 0.1));
    CHECK(check_feasible(lp, 10.0));
    CHECK_FALSE(check_feasible(lp, r.q_star - 0.01));
    CHECK_FALSE(check_feasible(lp, 0.0));
}

TEST_CASE("appending a summary coordinate never decreases q*") {
    SeedKey key = root_key(2718);
    for (std::uint64_t trial = 0; trial < 25; ++trial) {
        Stream s = stream_at(key, trial);
        const std::size_t n1 = 1 + static_cast<std::size_t>(s.next_double() * 3);
        const std::size_t k = 2 + static_cast<std::size_t>(s.next_double() * 5);
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
        const double q1 = solve_q_star(build_lp(make_matrix(data1), make_matrix(sims1))).q_star;
        const double q2 = solve_q_star(build_lp(make_matrix(data2), make_matrix(sims2))).q_star;
        CHECK(q2 >= q1 - 1e-7);
    }
}

TEST_CASE("LP optimum matches the grid-search oracle on small instances") {
    SeedKey key = root_key(1618);
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
        Stream s = stream_at(key, trial);
        const std::size_t n1 = 1 + static_cast<std::size_t>(s.next_double() * 3);
        const std::size_t k = 2 + static_cast<std::size_t>(s.next_double() * 5);
        std::vector<Vector> data(n1, Vector(1));
        std::vector<Vector> sims(k, Vector(1));
        for (auto& row : data) row[0] = s.next_uniform(0, 4);
        for (auto& row : sims) row[0] = s.next_uniform(0, 4);
        const BandLP lp = build_lp(make_matrix(data), make_matrix(sims));
        const double lp_q = solve_q_star(lp).q_star;
        const double grid_q = grid_qstar(lp);
        CHECK(grid_q >= lp_q - 1e-7); // grid search is a restriction
        CHECK(std::abs(lp_q - grid_q) <= 0.02);
    }
}

TEST_CASE("construct_eligibility_set end to end on the benchmark") {
    set_warnings_enabled(false);
    OscBenchmark bench;
    const SyntheticTruth truth = osc_truth();
    const SummarySpec spec = default_summary_spec(1, 0.1);
    const SeedKey key = root_key(90210);

    // data from the ground truth
    const std::size_t n1 = 20;
    std::vector<Trajectory> data;
    for (const auto& a : sample_truth(truth, n1, key.child("data"))) {
        data.push_back(bench.run(a, truth.e_true, std::nullopt, 127, 0.1));
    }

    EligibilityConfig cfg;
    cfg.box_e = bench.box_e;
    cfg.box_a = bench.box_a;
    cfg.n2 = 24;
    cfg.k = 200;
    cfg.steps = 127;
    cfg.dt = 0.1;
    cfg.seed = 4;
    cfg.threads = 1;

    const KSThreshold thr = threshold(0.05, 12, static_cast<int>(n1));
    const auto t0 = std::chrono::steady_clock::now();
    const EligibilitySet set = construct_eligibility_set(bench, data, spec, thr, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    std::printf("[timing] 24 records (n1=20, k=200): %.2f s\n",
                std::chrono::duration<double>(t1 - t0).count());

    REQUIRE(set.records.size() == 24);
    for (const auto& rec : set.records) {
        CHECK(rec.q_star > 0.0);
        CHECK(rec.eligible == (rec.q_star <= thr.q));
    }

    SUBCASE("threshold +inf makes everything eligible, 0 nothing") {
        KSThreshold loose = thr;
        loose.q = std::numeric_limits<double>::infinity();
        const EligibilitySet all = construct_eligibility_set(bench, data, spec, loose, cfg);
        CHECK(all.eligible_count() == all.records.size());

        KSThreshold tight = thr;
        tight.q = 0.0;
        const EligibilitySet none =
            construct_eligibility_set(bench, data, spec, tight, cfg);
        CHECK(none.eligible_count() == 0);
    }

    SUBCASE("records are independent of thread scheduling") {
        EligibilityConfig cfg4 = cfg;
        cfg4.threads = 4;
        const EligibilitySet set4 = construct_eligibility_set(bench, data, spec, thr, cfg4);
        REQUIRE(set4.records.size() == set.records.size());
        for (std::size_t i = 0; i < set.records.size(); ++i) {
            CHECK(set4.records[i].e.e == set.records[i].e.e);
            CHECK(set4.records[i].q_star == set.records[i].q_star);
        }
    }
    set_warnings_enabled(true);
}

TEST_CASE("coverage smoke: e_true stays eligible") {
    set_warnings_enabled(false);
    OscBenchmark bench;
    const SyntheticTruth truth = osc_truth();
    const SummarySpec spec = default_summary_spec(1, 0.1);
    const std::size_t n1 = 50, k = 500;
    const KSThreshold thr = threshold(0.05, 12, static_cast<int>(n1));

    int eligible = 0;
    const int reps = 10;
    const auto t0 = std::chrono::steady_clock::now();
    for (int rep = 0; rep < reps; ++rep) {
        const SeedKey key = root_key(1000 + static_cast<std::uint64_t>(rep));
        std::vector<Trajectory> data;
        for (const auto& a : sample_truth(truth, n1, key.child("data"))) {
            data.push_back(bench.run(a, truth.e_true, std::nullopt, 127, 0.1));
        }
        const Matrix data_summaries = summarize_all(data, spec);
        std::vector<AleatoryPoint> sample;
        for (auto& p : sample_uniform_box(bench.box_a, k, key.child("a-sample"))) {
            sample.push_back(AleatoryPoint{std::move(p)});
        }
        const auto r = qstar_for_point(bench, data_summaries, sample, truth.e_true,
                                       spec, 127, 0.1);
        if (r.q_star <= thr.q) ++eligible;
        if (rep == 0) {
            std::printf("[coverage] rep 0: q* = %.4f (threshold %.4f), iters %ld\n",
                        r.q_star, thr.q, r.iterations);
        }
    }
    const auto t1 = std::chrono::steady_clock::now();
    std::printf("[coverage] %d/%d eligible, %.2f s total\n", eligible, reps,
                std::chrono::duration<double>(t1 - t0).count());
    CHECK(eligible >= 8);
    set_warnings_enabled(true);
}

TEST_CASE("three-channel pipeline uses the 32-dimensional summaries") {
    set_warnings_enabled(false);
    OscBenchmark bench;
    bench.channels = 3;
    const SyntheticTruth truth = osc_truth();
    const SummarySpec spec = default_summary_spec(3, 0.1);
    REQUIRE(spec.dimension() == 32);

    const std::size_t n1 = 15;
    std::vector<Trajectory> data;
    const SeedKey key = root_key(606);
    for (const auto& a : sample_truth(truth, n1, key.child("data"))) {
        data.push_back(bench.run(a, truth.e_true, std::nullopt, 127, 0.1));
    }
    EligibilityConfig cfg;
    cfg.box_e = bench.box_e;
    cfg.box_a = bench.box_a;
    cfg.n2 = 12;
    cfg.k = 150;
    cfg.steps = 127;
    cfg.dt = 0.1;
    cfg.seed = 15;
    const KSThreshold thr = threshold(0.05, 32, static_cast<int>(n1));
    CHECK(thr.q == doctest::Approx(1.89).epsilon(0.003));

    const EligibilitySet set = construct_eligibility_set(bench, data, spec, thr, cfg);
    CHECK(set.records.size() == 12);
    // e_true itself stays eligible through the richer summary set
    std::vector<AleatoryPoint> sample;
    for (auto& p : sample_uniform_box(bench.box_a, cfg.k, key.child("a-sample"))) {
        sample.push_back(AleatoryPoint{std::move(p)});
    }
    // note: construct derives its own sample from cfg.seed; for the q* check
    // any fixed sample is fine
    const auto r = qstar_for_point(bench, summarize_all(data, spec), sample,
                                   truth.e_true, spec, 127, 0.1);
    CHECK(r.q_star <= thr.q);
    set_warnings_enabled(true);
}

TEST_CASE("simulator failures abort with the failing record identified") {
    struct FailingSim final : Simulator {
        Trajectory run(const AleatoryPoint& a, const EpistemicPoint& e,
                       const std::optional<Design>& design, int steps,
                       double dt) const override {
            if (e.e[0] > 1.0) throw DomainError("synthetic simulator blowup");
            OscBenchmark bench;
            return bench.run(a, e, design, steps, dt);
        }
        int channel_count() const override { return 1; }
    };
    set_warnings_enabled(false);
    FailingSim sim;
    OscBenchmark bench;
    const SyntheticTruth truth = osc_truth();
    const SummarySpec spec = default_summary_spec(1, 0.1);
    std::vector<Trajectory> data;
    for (const auto& a : sample_truth(truth, 5, root_key(8).child("data"))) {
        data.push_back(bench.run(a, truth.e_true, std::nullopt, 127, 0.1));
    }
    EligibilityConfig cfg;
    cfg.box_e = bench.box_e;
    cfg.box_a = bench.box_a;
    cfg.n2 = 8;
    cfg.k = 10;
    cfg.steps = 127;
    cfg.dt = 0.1;
    cfg.seed = 2;
    const KSThreshold thr = threshold(0.05, 12, 5);
    try {
        construct_eligibility_set(sim, data, spec, thr, cfg);
        FAIL("expected a SolverError");
    } catch (const SolverError& ex) {
        CHECK(std::string(ex.what()).find("record") != std::string::npos);
        CHECK(std::string(ex.what()).find("blowup") != std::string::npos);
    }
    set_warnings_enabled(true);
}

TEST_CASE("rank_parameters scores synthetic sets correctly") {
    EligibilitySet set;
    set.box_e = Box({0.0, 0.0}, {2.0, 2.0});
    set.threshold = threshold(0.05, 1, 10);
    // dim 0 spreads uniformly; dim 1 is pinned at 0.7
    for (int i = 0; i < 200; ++i) {
        EligibilityRecord rec;
        rec.e.e = {2.0 * (i + 0.5) / 200.0, 0.7};
        rec.q_star = 1.0;
        rec.eligible = true;
        set.records.push_back(rec);
    }
    const auto ranking = rank_parameters(set);
    REQUIRE(ranking.size() == 2);
    CHECK(ranking[0].dim == 1);
    CHECK(ranking[0].score == doctest::Approx(1.0));
    CHECK(ranking[1].dim == 0);
    CHECK(ranking[1].score == doctest::Approx(0.05).epsilon(0.05));

    SUBCASE("empty eligible set is an error") {
        for (auto& rec : set.records) rec.eligible = false;
        CHECK_THROWS_AS(rank_parameters(set), DomainError);
    }
}

TEST_CASE("reduce_set keeps the smallest q* records") {
    EligibilitySet set;
    set.box_e = Box({0.0}, {2.0});
    set.threshold = threshold(0.05, 12, 50);
    for (int i = 0; i < 10; ++i) {
        EligibilityRecord rec;
        rec.e.e = {0.1 * i};
        rec.q_star = 1.0 + 0.05 * i;
        rec.eligible = true;
        set.records.push_back(rec);
    }
    SUBCASE("r = 0 keeps everything") {
        const ReducedSet red = reduce_set(set, 0.0);
        CHECK(red.set.records.size() == 10);
        CHECK(red.q_r == doctest::Approx(1.45));
        CHECK(red.alpha_tilde ==
              doctest::Approx(12.0 * (1.0 - kolmogorov_cdf(1.45))).epsilon(1e-12));
    }
    SUBCASE("r = 40 keeps ceil(6) = 6") {
        const ReducedSet red = reduce_set(set, 40.0);
        CHECK(red.set.records.size() == 6);
        CHECK(red.q_r == doctest::Approx(1.25));
    }
    SUBCASE("ceiling retention: 114 -> 103 at r = 10") {
        EligibilitySet big;
        big.box_e = Box({0.0}, {2.0});
        big.threshold = threshold(0.05, 32, 100);
        for (int i = 0; i < 114; ++i) {
            EligibilityRecord rec;
            rec.e.e = {i / 114.0};
            rec.q_star = 1.0 + i * 1e-3;
            rec.eligible = true;
            big.records.push_back(rec);
        }
        CHECK(reduce_set(big, 10.0).set.records.size() == 103);
    }
    SUBCASE("r out of range") {
        CHECK_THROWS_AS(reduce_set(set, 100.0), DomainError);
        CHECK_THROWS_AS(reduce_set(set, -1.0), DomainError);
    }
}

TEST_CASE("tabulated confidence mapping at m = 32") {
    // feeding the tabulated q values through alpha~ = m (1 - K(q))
    const double conf_189 = 1.0 - 32.0 * (1.0 - kolmogorov_cdf(1.89));
    const double conf_1879 = 1.0 - 32.0 * (1.0 - kolmogorov_cdf(1.879));
    CHECK(std::abs(conf_189 - 0.95) < 0.002);
    CHECK(std::abs(conf_1879 - 0.946) < 0.002);
}

TEST_CASE("subsample study: tiny sizes are always eligible, full size reproduces") {
    set_warnings_enabled(false);
    OscBenchmark bench;
    const SyntheticTruth truth = osc_truth();
    const SummarySpec spec = default_summary_spec(1, 0.1);
    const std::size_t n1 = 12;
    std::vector<Trajectory> data;
    const SeedKey key = root_key(777);
    for (const auto& a : sample_truth(truth, n1, key.child("data"))) {
        data.push_back(bench.run(a, truth.e_true, std::nullopt, 127, 0.1));
    }

    EligibilityConfig cfg;
    cfg.box_e = bench.box_e;
    cfg.box_a = bench.box_a;
    cfg.n2 = 10;
    cfg.k = 120;
    cfg.steps = 127;
    cfg.dt = 0.1;
    cfg.seed = 31;
    cfg.threads = 2;

    const auto table = subsample_study(bench, data, {1, 12}, 2, 0.05, spec, cfg);
    REQUIRE(table.size() == 2);
    // band q/sqrt(1) > 1 makes every constraint window vacuous
    CHECK(table[0].mean_eligible_fraction == doctest::Approx(1.0));

    const KSThreshold thr = threshold(0.05, 12, 12);
    const EligibilitySet direct = construct_eligibility_set(bench, data, spec, thr, cfg);
    const double direct_fraction = static_cast<double>(direct.eligible_count()) /
                                   static_cast<double>(direct.records.size());
    CHECK(table[1].mean_eligible_fraction == doctest::Approx(direct_fraction));
    set_warnings_enabled(true);
}
