// drocal: calibration, reliability and robust-design toolkit for black-box
// simulators with aleatory + epistemic inputs.
//
// Subcommands: generate | calibrate | rank | subsample | reliability |
//              design | risk
// Exit codes:  0 ok, 1 domain/config error, 2 numerical/solver error,
//              3 external-simulator protocol error.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "drocal/aleatory.hpp"
#include "drocal/config.hpp"
#include "drocal/design.hpp"
#include "drocal/eligibility.hpp"
#include "drocal/errors.hpp"
#include "drocal/io.hpp"
#include "drocal/ksstat.hpp"
#include "drocal/model.hpp"
#include "drocal/summary.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace drocal;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n1, n2, k;
    std::optional<double> alpha;
    std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-c,--config", args.config_path, "JSON config file");
    cmd->add_option("-o,--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "root seed override");
    cmd->add_option("--n1", args.n1, "data count override");
    cmd->add_option("--n2", args.n2, "epistemic sample count override");
    cmd->add_option("--k", args.k, "aleatory sample count override");
    cmd->add_option("--alpha", args.alpha, "confidence parameter override");
    cmd->add_option("--threads", args.threads, "worker thread count override");
}

RunConfig resolve_config(const CommonArgs& args) {
    RunConfig cfg;
    if (!args.config_path.empty()) cfg = RunConfig::load_file(args.config_path);
    if (args.seed) cfg.seed = *args.seed;
    if (args.n1) cfg.n1 = *args.n1;
    if (args.n2) cfg.n2 = *args.n2;
    if (args.k) cfg.k = *args.k;
    if (args.alpha) cfg.alpha = *args.alpha;
    if (args.threads) cfg.threads = *args.threads;
    cfg.validate();
    return cfg;
}

Vector parse_vector(const std::string& text) {
    Vector out;
    std::string cell;
    std::istringstream ss(text);
    while (std::getline(ss, cell, ',')) {
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw DomainError("bad number in vector: '" + cell + "'");
        }
    }
    if (out.empty()) throw DomainError("empty vector argument");
    return out;
}

// ---------------------------------------------------------------- generate

int cmd_generate(const CommonArgs& args) {
    const RunConfig cfg = resolve_config(args);
    const auto sim = cfg.make_simulator();
    const SyntheticTruth truth = osc_truth();
    const SeedKey key = root_key(cfg.seed);

    const fs::path out(args.out_dir);
    const fs::path data_dir = out / "data";
    fs::create_directories(data_dir);

    const auto a_points = sample_truth(truth, cfg.n1, key.child("data"));
    std::vector<Trajectory> trajectories;
    trajectories.reserve(cfg.n1);
    char name[32];
    for (std::size_t i = 0; i < cfg.n1; ++i) {
        trajectories.push_back(
            sim->run(a_points[i], truth.e_true, std::nullopt, cfg.steps, cfg.dt));
        std::snprintf(name, sizeof(name), "traj_%04zu.csv", i);
        write_trajectory_csv(data_dir / name, trajectories.back());
    }
    const SummarySpec spec = cfg.make_summary_spec();
    write_summary_csv(out / "data_summaries.csv", summarize_all(trajectories, spec),
                      spec.column_names());
    std::printf("generate: wrote %zu trajectories to %s\n", cfg.n1,
                data_dir.string().c_str());
    return 0;
}

// --------------------------------------------------------------- calibrate

int cmd_calibrate(const CommonArgs& args, const std::string& data_dir) {
    const RunConfig cfg = resolve_config(args);
    const auto sim = cfg.make_simulator();
    const SummarySpec spec = cfg.make_summary_spec();
    const auto data = read_trajectory_dir(data_dir);
    const KSThreshold thr = threshold(cfg.alpha, static_cast<int>(spec.dimension()),
                                      static_cast<int>(data.size()));

    EligibilityConfig ecfg;
    ecfg.box_e = cfg.box_e;
    ecfg.box_a = cfg.box_a;
    ecfg.n2 = cfg.n2;
    ecfg.k = cfg.k;
    ecfg.steps = cfg.steps;
    ecfg.dt = cfg.dt;
    ecfg.resample_per_e = cfg.resample_per_e;
    ecfg.threads = cfg.threads;
    ecfg.seed = cfg.seed;

    const EligibilitySet set = construct_eligibility_set(*sim, data, spec, thr, ecfg);

    const fs::path out(args.out_dir);
    fs::create_directories(out);
    const json cfg_json = cfg.to_json();
    json doc = eligibility_to_json(set, cfg_json, json_hash(cfg_json));
    doc["data_summaries"] = matrix_to_json(summarize_all(data, spec));
    write_text_file(out / "eligibility.json", doc.dump(2) + "\n");
    write_qstar_csv(out / "qstar_vs_e.csv", set);
    std::printf("calibrate: %zu/%zu eligible at q = %.4f\n", set.eligible_count(),
                set.records.size(), thr.q);
    return 0;
}

// ------------------------------------------------- downstream shared state

struct Bundle {
    RunConfig cfg;
    json cfg_json;
    std::string cfg_hash;
    std::unique_ptr<Simulator> sim;
    SummarySpec spec;
    EligibilitySet set;
    Matrix data_summaries;
    std::vector<AleatoryPoint> sample;
    std::vector<EpistemicPoint> eligible;
};

Bundle load_bundle(const std::string& eligibility_path,
                   const std::optional<int>& threads_override) {
    json doc;
    try {
        doc = json::parse(read_text_file(eligibility_path));
    } catch (const json::exception& ex) {
        throw DomainError("bad eligibility JSON: " + std::string(ex.what()));
    }
    Bundle b;
    b.cfg = RunConfig::from_json(doc.at("config"));
    if (threads_override) b.cfg.threads = *threads_override;
    b.cfg_json = b.cfg.to_json();
    b.cfg_hash = json_hash(b.cfg_json);
    b.sim = b.cfg.make_simulator();
    b.spec = b.cfg.make_summary_spec();
    b.set = eligibility_from_json(doc, &b.data_summaries);
    if (b.data_summaries.rows() == 0) {
        throw DomainError("eligibility JSON lacks data_summaries");
    }
    for (auto& p :
         sample_uniform_box(b.cfg.box_a, b.set.provenance.k,
                            root_key(b.set.provenance.seed).child("a-sample"))) {
        b.sample.push_back(AleatoryPoint{std::move(p)});
    }
    for (const auto* rec : b.set.eligible_records()) b.eligible.push_back(rec->e);
    if (b.eligible.empty()) throw DomainError("no eligible records in the set");
    return b;
}

ReliabilityContext make_context(const Bundle& b) {
    ReliabilityContext ctx;
    ctx.sim = b.sim.get();
    ctx.data_summaries = b.data_summaries;
    ctx.spec = b.spec;
    ctx.thr = b.set.threshold;
    ctx.points = b.sample;
    ctx.steps = b.cfg.steps;
    ctx.dt = b.cfg.dt;
    return ctx;
}

// -------------------------------------------------------------------- rank

int cmd_rank(const std::string& eligibility_path, const std::string& out_dir) {
    json doc = json::parse(read_text_file(eligibility_path));
    const EligibilitySet set = eligibility_from_json(doc, nullptr);
    const auto ranking = rank_parameters(set);

    fs::create_directories(out_dir);
    std::string csv = "rank,dimension,score\n";
    for (std::size_t r = 0; r < ranking.size(); ++r) {
        csv += std::to_string(r + 1) + ",e" + std::to_string(ranking[r].dim + 1) + "," +
               format_double(ranking[r].score, 12) + "\n";
        std::printf("rank %zu: e%zu  score %.4f\n", r + 1, ranking[r].dim + 1,
                    ranking[r].score);
    }
    write_text_file(fs::path(out_dir) / "ranking.csv", csv);
    return 0;
}

// --------------------------------------------------------------- subsample

int cmd_subsample(const CommonArgs& args, const std::string& data_dir,
                  const std::string& sizes_text, std::size_t reps) {
    const RunConfig cfg = resolve_config(args);
    const auto sim = cfg.make_simulator();
    const SummarySpec spec = cfg.make_summary_spec();
    const auto data = read_trajectory_dir(data_dir);

    std::vector<std::size_t> sizes;
    for (double v : parse_vector(sizes_text)) {
        sizes.push_back(static_cast<std::size_t>(v));
    }

    EligibilityConfig ecfg;
    ecfg.box_e = cfg.box_e;
    ecfg.box_a = cfg.box_a;
    ecfg.n2 = cfg.n2;
    ecfg.k = cfg.k;
    ecfg.steps = cfg.steps;
    ecfg.dt = cfg.dt;
    ecfg.resample_per_e = cfg.resample_per_e;
    ecfg.threads = cfg.threads;
    ecfg.seed = cfg.seed;

    const auto table = subsample_study(*sim, data, sizes, reps, cfg.alpha, spec, ecfg);
    fs::create_directories(args.out_dir);
    std::string csv = "n1,eligible_fraction\n";
    for (const auto& row : table) {
        csv += std::to_string(row.size) + "," +
               format_double(row.mean_eligible_fraction, 12) + "\n";
        std::printf("n1 = %zu: eligible fraction %.3f\n", row.size,
                    row.mean_eligible_fraction);
    }
    write_text_file(fs::path(args.out_dir) / "subsample.csv", csv);
    return 0;
}

// ------------------------------------------------------------- reliability

int cmd_reliability(const std::string& eligibility_path, const std::string& out_dir,
                    const std::string& theta_text,
                    const std::optional<int>& threads_override) {
    Bundle b = load_bundle(eligibility_path, threads_override);
    const Design theta{theta_text.empty() ? b.cfg.theta_baseline
                                          : parse_vector(theta_text)};
    const ReliabilityContext ctx = make_context(b);
    const DesignReport report = design_report(theta, b.eligible, ctx, b.cfg.threads);

    fs::create_directories(out_dir);
    json doc = reliability_to_json(report.reliability, report.objective, theta);
    doc["config_hash"] = b.cfg_hash;
    doc["seed"] = b.cfg.seed;
    write_text_file(fs::path(out_dir) / "reliability.json", doc.dump(2) + "\n");
    write_rminmax_csv(fs::path(out_dir) / "rminmax.csv", report.reliability);
    std::printf("reliability: R(any) in [%.4f, %.4f], %zu point(s) skipped\n",
                report.reliability.any_range[0], report.reliability.any_range[1],
                report.reliability.skipped);
    return 0;
}

// ------------------------------------------------------------------ design

int cmd_design(const std::string& eligibility_path, const std::string& out_dir,
               const std::optional<int>& threads_override) {
    Bundle b = load_bundle(eligibility_path, threads_override);

    std::vector<EpistemicPoint> eligible = b.eligible;
    if (b.cfg.kw.e_cap > 0 && eligible.size() > b.cfg.kw.e_cap) {
        // keep the lowest-q* records: most eligible first
        std::vector<const EligibilityRecord*> recs = b.set.eligible_records();
        std::stable_sort(recs.begin(), recs.end(), [](const auto* x, const auto* y) {
            return x->q_star < y->q_star;
        });
        eligible.clear();
        for (std::size_t i = 0; i < b.cfg.kw.e_cap; ++i) eligible.push_back(recs[i]->e);
    }

    RobustObjectiveContext ctx;
    ctx.sim = b.sim.get();
    ctx.data_summaries = b.data_summaries;
    ctx.spec = b.spec;
    ctx.thr = b.set.threshold;
    ctx.box_a = b.cfg.box_a;
    ctx.k = b.set.provenance.k;
    ctx.steps = b.cfg.steps;
    ctx.dt = b.cfg.dt;
    ctx.threads = b.cfg.threads;

    const SeedKey kw_key = root_key(b.cfg.seed).child("kw");
    const Design baseline{b.cfg.theta_baseline};
    const KWResult result =
        kw_optimize(baseline, b.cfg.kw, make_robust_objective(eligible, ctx), kw_key);

    fs::create_directories(out_dir);
    json doc;
    doc["theta_baseline"] = baseline.theta;
    doc["theta_new"] = result.theta_new.theta;
    doc["initial_objective"] = result.trace.initial_objective;
    doc["final_objective"] = result.trace.final_objective;
    doc["eligible_used"] = eligible.size();
    doc["config_hash"] = b.cfg_hash;
    doc["seed"] = b.cfg.seed;
    write_text_file(fs::path(out_dir) / "design.json", doc.dump(2) + "\n");
    write_kw_trace_csv(fs::path(out_dir) / "kw_trace.csv", result.trace);
    std::printf("design: objective %.4f -> %.4f over %zu eligible point(s)\n",
                result.trace.initial_objective, result.trace.final_objective,
                eligible.size());
    return 0;
}

// -------------------------------------------------------------------- risk

int cmd_risk(const std::string& eligibility_path, const std::string& out_dir,
             const std::string& levels_text, const std::string& theta_text,
             const std::optional<int>& threads_override) {
    Bundle b = load_bundle(eligibility_path, threads_override);
    const Design theta{theta_text.empty() ? b.cfg.theta_baseline
                                          : parse_vector(theta_text)};
    std::vector<double> levels =
        levels_text.empty() ? b.cfg.risk_levels : parse_vector(levels_text);

    // sim summaries per eligible point are level-independent; cache them
    const auto eligible_records = b.set.eligible_records();
    std::vector<Matrix> sims_cache(eligible_records.size());
    for (std::size_t i = 0; i < eligible_records.size(); ++i) {
        sims_cache[i] = sim_summaries_at(*b.sim, b.sample, eligible_records[i]->e,
                                         b.spec, b.cfg.steps, b.cfg.dt);
    }
    ReliabilityContext ctx = make_context(b);

    std::string csv = "r_percent,retained,q_r,confidence,objective,any_lo,any_hi\n";
    fs::create_directories(out_dir);
    for (double r : levels) {
        const ReducedSet reduced = reduce_set(b.set, r);
        const double q_r = reduced.q_r;
        double objective = 0.0, any_lo = 2.0, any_hi = -1.0;
        std::size_t used = 0;
        for (std::size_t i = 0; i < eligible_records.size(); ++i) {
            // retained <=> q* <= q_r
            if (eligible_records[i]->q_star > q_r) continue;
            WeightPolytope u = make_polytope(b.data_summaries, sims_cache[i], b.sample,
                                             b.set.threshold);
            u.q = q_r;
            if (!check_feasible(u.lp, q_r)) continue;
            ++used;
            const RminRmax rr = rmin_rmax(eligible_records[i]->e, theta, u, ctx);
            objective = std::max(objective, rr.r_min);
            any_lo = std::min(any_lo, rr.r_min);
            any_hi = std::max(any_hi, rr.r_max);
        }
        if (used == 0) {
            any_lo = 0.0;
            any_hi = 0.0;
        }
        csv += format_double(r, 12) + "," + std::to_string(reduced.set.records.size()) +
               "," + format_double(q_r, 12) + "," +
               format_double(1.0 - reduced.alpha_tilde, 12) + "," +
               format_double(objective, 12) + "," + format_double(any_lo, 12) + "," +
               format_double(any_hi, 12) + "\n";
        std::printf("r = %g%%: retained %zu, q_r %.4f, confidence %.4f\n", r,
                    reduced.set.records.size(), q_r, 1.0 - reduced.alpha_tilde);
    }
    write_text_file(fs::path(out_dir) / "risk.csv", csv);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"calibration and robust-design toolkit for stochastic simulators"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string data_dir, eligibility_path, theta_text, sizes_text = "10,25,50";
    std::string levels_text;
    std::size_t reps = 3;

    auto* gen = app.add_subcommand("generate", "emit synthetic data trajectories");
    add_common(gen, args);

    auto* cal = app.add_subcommand("calibrate", "build the eligibility set from data");
    add_common(cal, args);
    cal->add_option("-d,--data", data_dir, "directory of traj_*.csv files")->required();

    auto* rank = app.add_subcommand("rank", "rank epistemic dimensions by shrinkage");
    rank->add_option("--eligibility", eligibility_path, "eligibility.json")->required();
    rank->add_option("-o,--out", args.out_dir, "output directory");

    auto* sub = app.add_subcommand("subsample", "eligible fraction vs data size");
    add_common(sub, args);
    sub->add_option("-d,--data", data_dir, "directory of traj_*.csv files")->required();
    sub->add_option("--sizes", sizes_text, "comma-separated subsample sizes");
    sub->add_option("--reps", reps, "replications per size");

    auto* rel = app.add_subcommand("reliability", "failure probability ranges");
    rel->add_option("--eligibility", eligibility_path, "eligibility.json")->required();
    rel->add_option("-o,--out", args.out_dir, "output directory");
    rel->add_option("--theta", theta_text, "design point, comma-separated");
    rel->add_option("--threads", args.threads, "worker thread count");

    auto* des = app.add_subcommand("design", "robust design optimization");
    des->add_option("--eligibility", eligibility_path, "eligibility.json")->required();
    des->add_option("-o,--out", args.out_dir, "output directory");
    des->add_option("--threads", args.threads, "worker thread count");

    auto* risk = app.add_subcommand("risk", "risk-based set reduction table");
    risk->add_option("--eligibility", eligibility_path, "eligibility.json")->required();
    risk->add_option("-o,--out", args.out_dir, "output directory");
    risk->add_option("--levels", levels_text, "comma-separated r%% levels");
    risk->add_option("--theta", theta_text, "design point, comma-separated");
    risk->add_option("--threads", args.threads, "worker thread count");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate(args);
        if (cal->parsed()) return cmd_calibrate(args, data_dir);
        if (rank->parsed()) return cmd_rank(eligibility_path, args.out_dir);
        if (sub->parsed()) return cmd_subsample(args, data_dir, sizes_text, reps);
        if (rel->parsed()) {
            return cmd_reliability(eligibility_path, args.out_dir, theta_text,
                                   args.threads);
        }
        if (des->parsed()) return cmd_design(eligibility_path, args.out_dir, args.threads);
        if (risk->parsed()) {
            return cmd_risk(eligibility_path, args.out_dir, levels_text, theta_text,
                            args.threads);
        }
    } catch (const ProtocolError& ex) {
        std::fprintf(stderr, "protocol error: %s\n", ex.what());
        return 3;
    } catch (const TransportError& ex) {
        std::fprintf(stderr, "transport error: %s\n", ex.what());
        return 3;
    } catch (const SolverError& ex) {
        std::fprintf(stderr, "solver error: %s\n", ex.what());
        return 2;
    } catch (const DomainError& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
    return 0;
}
