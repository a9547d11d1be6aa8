#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "drocal/design.hpp"
#include "drocal/model.hpp"
#include "drocal/summary.hpp"
#include "drocal/types.hpp"

namespace drocal {

// Declarative run configuration: JSON file with CLI flag overrides.
// Precedence: flags > file > defaults.
struct RunConfig {
    std::uint64_t seed = 1;
    std::size_t n1 = 50;
    std::size_t n2 = 200;
    std::size_t k = 500;
    double alpha = 0.05;
    int channels = 1;
    int steps = 127;
    double dt = 0.1;
    Box box_a{Vector{0.0, 0.0, 0.0}, Vector{1.0, 1.0, 1.0}};
    Box box_e{Vector{0.0, 0.0, 0.0, 0.0}, Vector{2.0, 2.0, 2.0, 2.0}};
    bool resample_per_e = false;
    int threads = 1;

    std::string simulator = "osc2"; // "osc2" | "external"
    std::vector<std::string> external_command;
    double external_timeout_s = 30.0;

    Vector theta_baseline{1.4, 0.9};
    KWParams kw;
    std::vector<double> risk_levels{0.0, 2.0, 4.0, 6.0, 8.0, 10.0};

    // summary bands; band2_hi <= 0 means "auto": min(5.98, nyquist)
    double band1_lo = 0.0, band1_hi = 1.59;
    double band2_lo = 1.71, band2_hi = 0.0;

    void validate() const;                 // throws DomainError
    nlohmann::json to_json() const;        // canonical resolved form
    static RunConfig from_json(const nlohmann::json& j); // defaults + overrides
    static RunConfig load_file(const std::string& path);

    SummarySpec make_summary_spec() const;
    std::unique_ptr<Simulator> make_simulator() const;
};

} // namespace drocal
