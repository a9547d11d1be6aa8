#include "drocal/config.hpp"

#include <algorithm>
#include <fstream>

#include "drocal/errors.hpp"
#include "drocal/subprocess_sim.hpp"

namespace drocal {

using nlohmann::json;

void RunConfig::validate() const {
    if (theta_baseline.empty()) throw DomainError("theta_baseline must be nonempty");
    if (n1 < 1 || n2 < 1 || k < 1) throw DomainError("n1, n2, k must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
    if (steps < 2) throw DomainError("steps must be at least 2");
    if (!(dt > 0.0)) throw DomainError("dt must be positive");
    if (channels != 1 && channels != 3) throw DomainError("channels must be 1 or 3");
    if (threads < 1) throw DomainError("threads must be at least 1");
    if (simulator != "osc2" && simulator != "external") {
        throw DomainError("simulator must be 'osc2' or 'external'");
    }
    if (simulator == "external" && external_command.empty()) {
        throw DomainError("external simulator requires a command");
    }
    for (double r : risk_levels) {
        if (!(r >= 0.0 && r < 100.0)) throw DomainError("risk levels must lie in [0,100)");
    }
    if (!(band1_lo < band1_hi) || !(band2_lo > band1_hi)) {
        throw DomainError("summary bands must be ordered: band1 below band2");
    }
}

json RunConfig::to_json() const {
    json j;
    j["seed"] = seed;
    j["n1"] = n1;
    j["n2"] = n2;
    j["k"] = k;
    j["alpha"] = alpha;
    j["channels"] = channels;
    j["steps"] = steps;
    j["dt"] = dt;
    j["box_a"] = {{"lower", box_a.lower}, {"upper", box_a.upper}};
    j["box_e"] = {{"lower", box_e.lower}, {"upper", box_e.upper}};
    j["resample_per_e"] = resample_per_e;
    j["threads"] = threads;
    j["simulator"] = simulator;
    j["external_command"] = external_command;
    j["external_timeout_s"] = external_timeout_s;
    j["theta_baseline"] = theta_baseline;
    j["kw"] = {{"c0", kw.c0}, {"a0", kw.a0}, {"n_max", kw.n_max}, {"e_cap", kw.e_cap}};
    j["risk_levels"] = risk_levels;
    j["bands"] = {{"band1_lo", band1_lo},
                  {"band1_hi", band1_hi},
                  {"band2_lo", band2_lo},
                  {"band2_hi", band2_hi}};
    return j;
}

RunConfig RunConfig::from_json(const json& j) {
    RunConfig cfg;
    auto get = [&](const char* key, auto& slot) {
        if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
    };
    get("seed", cfg.seed);
    get("n1", cfg.n1);
    get("n2", cfg.n2);
    get("k", cfg.k);
    get("alpha", cfg.alpha);
    get("channels", cfg.channels);
    get("steps", cfg.steps);
    get("dt", cfg.dt);
    if (j.contains("box_a")) {
        cfg.box_a = Box(j.at("box_a").at("lower").get<Vector>(),
                        j.at("box_a").at("upper").get<Vector>());
    }
    if (j.contains("box_e")) {
        cfg.box_e = Box(j.at("box_e").at("lower").get<Vector>(),
                        j.at("box_e").at("upper").get<Vector>());
    }
    get("resample_per_e", cfg.resample_per_e);
    get("threads", cfg.threads);
    get("simulator", cfg.simulator);
    get("external_command", cfg.external_command);
    get("external_timeout_s", cfg.external_timeout_s);
    get("theta_baseline", cfg.theta_baseline);
    if (j.contains("kw")) {
        const auto& kwj = j.at("kw");
        if (kwj.contains("c0")) cfg.kw.c0 = kwj.at("c0").get<double>();
        if (kwj.contains("a0")) cfg.kw.a0 = kwj.at("a0").get<double>();
        if (kwj.contains("n_max")) cfg.kw.n_max = kwj.at("n_max").get<int>();
        if (kwj.contains("e_cap")) cfg.kw.e_cap = kwj.at("e_cap").get<std::size_t>();
    }
    get("risk_levels", cfg.risk_levels);
    if (j.contains("bands")) {
        const auto& b = j.at("bands");
        if (b.contains("band1_lo")) cfg.band1_lo = b.at("band1_lo").get<double>();
        if (b.contains("band1_hi")) cfg.band1_hi = b.at("band1_hi").get<double>();
        if (b.contains("band2_lo")) cfg.band2_lo = b.at("band2_lo").get<double>();
        if (b.contains("band2_hi")) cfg.band2_hi = b.at("band2_hi").get<double>();
    }
    cfg.validate();
    return cfg;
}

RunConfig RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw DomainError("bad JSON in " + path + ": " + ex.what());
    }
    return from_json(j);
}

SummarySpec RunConfig::make_summary_spec() const {
    const double nyquist = 0.5 / dt;
    const double b2_hi = band2_hi > 0.0 ? band2_hi : std::min(5.98, nyquist);
    if (!(band2_lo < b2_hi) || b2_hi > nyquist || band1_hi >= nyquist) {
        throw DomainError("summary bands exceed the Nyquist frequency");
    }
    using P = PeakSpec::Part;
    using D = PeakSpec::Direction;
    const std::vector<PeakSpec> primary = {
        {P::Real, band1_lo, band1_hi, D::Max}, {P::Real, band1_lo, band1_hi, D::Min},
        {P::Real, band2_lo, b2_hi, D::Max},    {P::Real, band2_lo, b2_hi, D::Min},
        {P::Imag, band1_lo, band1_hi, D::Min}, {P::Imag, band2_lo, b2_hi, D::Max},
    };
    const std::vector<PeakSpec> auxiliary = {
        {P::Real, band1_lo, band1_hi, D::Max}, {P::Real, band1_lo, band1_hi, D::Min},
        {P::Real, band2_lo, b2_hi, D::Max},    {P::Imag, band1_lo, band1_hi, D::Min},
        {P::Imag, band2_lo, b2_hi, D::Max},
    };
    SummarySpec spec;
    spec.per_channel.push_back(primary);
    for (int c = 1; c < channels; ++c) spec.per_channel.push_back(auxiliary);
    return spec;
}

std::unique_ptr<Simulator> RunConfig::make_simulator() const {
    if (simulator == "osc2") {
        auto sim = std::make_unique<OscBenchmark>();
        sim->box_a = box_a;
        sim->box_e = box_e;
        sim->default_steps = steps;
        sim->default_dt = dt;
        sim->channels = channels;
        return sim;
    }
    SubprocessSpec spec;
    spec.argv = external_command;
    spec.timeout_s = external_timeout_s;
    spec.channels = channels;
    return std::make_unique<SubprocessSimulator>(spec);
}

} // namespace drocal
