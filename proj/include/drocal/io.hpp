#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "drocal/aleatory.hpp"
#include "drocal/design.hpp"
#include "drocal/eligibility.hpp"
#include "drocal/types.hpp"

namespace drocal {

// All writers emit fixed formats (no timestamps, no locale dependence) so a
// rerun with the same inputs is byte-identical.

// Trajectory CSV: header "t,ch0[,ch1,...]", one row per time step.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

// data directory: traj_%04zu.csv, ordered by index
std::vector<std::filesystem::path> list_trajectory_files(
    const std::filesystem::path& dir);
std::vector<Trajectory> read_trajectory_dir(const std::filesystem::path& dir);

// Summary matrix CSV: one row per trajectory, named columns.
void write_summary_csv(const std::filesystem::path& path, const Matrix& summaries,
                       const std::vector<std::string>& columns);

// Eligibility set JSON document and the q*-vs-e plotting CSV.
nlohmann::json eligibility_to_json(const EligibilitySet& set,
                                   const nlohmann::json& config,
                                   const std::string& config_hash);
EligibilitySet eligibility_from_json(const nlohmann::json& doc, Matrix* data_summaries);
void write_qstar_csv(const std::filesystem::path& path, const EligibilitySet& set);

// Matrix <-> JSON rows
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& rows);

nlohmann::json reliability_to_json(const ReliabilityReport& report, double objective,
                                   const Design& theta);
void write_rminmax_csv(const std::filesystem::path& path,
                       const ReliabilityReport& report);

// KW trace CSV: sweep, coordinate, up, down, gradient, objective estimate.
void write_kw_trace_csv(const std::filesystem::path& path, const KWTrace& trace);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

// FNV-1a hex digest of a canonical JSON dump; used as config provenance.
std::string json_hash(const nlohmann::json& j);

// fixed-format double rendering used by every CSV writer
std::string format_double(double v, int precision = 17);

} // namespace drocal
