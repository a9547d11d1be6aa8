#include "drocal/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "drocal/errors.hpp"

namespace drocal {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v, int precision) {
    if (v == 0.0) v = 0.0; // never emit "-0"
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    return buf;
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DomainError("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw DomainError("write failed: " + path.string());
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_trajectory_csv(const fs::path& path, const Trajectory& traj) {
    traj.validate();
    std::string out = "t";
    for (std::size_t c = 0; c < traj.channels.size(); ++c) {
        out += ",ch" + std::to_string(c);
    }
    out += "\n";
    for (std::size_t t = 0; t < traj.length(); ++t) {
        out += format_double(static_cast<double>(t) * traj.dt);
        for (const auto& ch : traj.channels) {
            out += ",";
            out += format_double(ch[t]);
        }
        out += "\n";
    }
    write_text_file(path, out);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

double parse_double(const std::string& s, const fs::path& path) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DomainError("bad number '" + s + "' in " + path.string());
    }
}

} // namespace

Trajectory read_trajectory_csv(const fs::path& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line)) throw DomainError("empty trajectory file " + path.string());
    const auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "t") {
        throw DomainError("bad trajectory header in " + path.string());
    }
    const std::size_t channels = header.size() - 1;

    Trajectory traj;
    traj.channels.resize(channels);
    std::vector<double> times;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != channels + 1) {
            throw DomainError("ragged trajectory row in " + path.string());
        }
        times.push_back(parse_double(cells[0], path));
        for (std::size_t c = 0; c < channels; ++c) {
            traj.channels[c].push_back(parse_double(cells[c + 1], path));
        }
    }
    if (times.size() < 2) throw DomainError("trajectory too short in " + path.string());
    traj.dt = times[1] - times[0];
    for (std::size_t t = 1; t < times.size(); ++t) {
        if (std::abs(times[t] - times[t - 1] - traj.dt) > 1e-9 * std::max(1.0, traj.dt)) {
            throw DomainError("non-uniform time grid in " + path.string());
        }
    }
    traj.validate();
    return traj;
}

std::vector<fs::path> list_trajectory_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw DomainError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("traj_", 0) == 0 && entry.path().extension() == ".csv") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw DomainError("no traj_*.csv files in " + dir.string());
    return files;
}

std::vector<Trajectory> read_trajectory_dir(const fs::path& dir) {
    std::vector<Trajectory> out;
    for (const auto& file : list_trajectory_files(dir)) {
        out.push_back(read_trajectory_csv(file));
    }
    return out;
}

void write_summary_csv(const fs::path& path, const Matrix& summaries,
                       const std::vector<std::string>& columns) {
    if (columns.size() != summaries.cols()) {
        throw DomainError("summary column names do not match matrix width");
    }
    std::string out;
    for (std::size_t j = 0; j < columns.size(); ++j) {
        out += (j == 0 ? "" : ",") + columns[j];
    }
    out += "\n";
    for (std::size_t i = 0; i < summaries.rows(); ++i) {
        for (std::size_t j = 0; j < summaries.cols(); ++j) {
            if (j > 0) out += ",";
            out += format_double(summaries(i, j), 12);
        }
        out += "\n";
    }
    write_text_file(path, out);
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& rows) {
    if (!rows.is_array() || rows.empty()) throw DomainError("bad matrix JSON");
    const std::size_t cols = rows.front().size();
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw DomainError("ragged matrix JSON");
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j].get<double>();
    }
    return m;
}

json eligibility_to_json(const EligibilitySet& set, const json& config,
                         const std::string& config_hash) {
    json doc;
    doc["config"] = config;
    doc["config_hash"] = config_hash;
    doc["threshold"] = {{"alpha", set.threshold.alpha}, {"m", set.threshold.m},
                        {"n1", set.threshold.n1},       {"q", set.threshold.q},
                        {"band", set.threshold.band}};
    doc["provenance"] = {{"seed", set.provenance.seed},
                         {"n1", set.provenance.n1},
                         {"n2", set.provenance.n2},
                         {"k", set.provenance.k},
                         {"spec_hash", set.provenance.spec_hash},
                         {"resample_per_e", set.provenance.resample_per_e}};
    doc["box_e"] = {{"lower", set.box_e.lower}, {"upper", set.box_e.upper}};
    json records = json::array();
    for (const auto& rec : set.records) {
        records.push_back({{"e", rec.e.e}, {"q_star", rec.q_star},
                           {"eligible", rec.eligible}});
    }
    doc["records"] = std::move(records);
    return doc;
}

EligibilitySet eligibility_from_json(const json& doc, Matrix* data_summaries) {
    EligibilitySet set;
    const auto& thr = doc.at("threshold");
    set.threshold.alpha = thr.at("alpha").get<double>();
    set.threshold.m = thr.at("m").get<int>();
    set.threshold.n1 = thr.at("n1").get<int>();
    set.threshold.q = thr.at("q").get<double>();
    set.threshold.band = thr.at("band").get<double>();
    const auto& prov = doc.at("provenance");
    set.provenance.seed = prov.at("seed").get<std::uint64_t>();
    set.provenance.n1 = prov.at("n1").get<std::size_t>();
    set.provenance.n2 = prov.at("n2").get<std::size_t>();
    set.provenance.k = prov.at("k").get<std::size_t>();
    set.provenance.spec_hash = prov.at("spec_hash").get<std::string>();
    set.provenance.resample_per_e = prov.at("resample_per_e").get<bool>();
    set.box_e = Box(doc.at("box_e").at("lower").get<Vector>(),
                    doc.at("box_e").at("upper").get<Vector>());
    for (const auto& rec : doc.at("records")) {
        EligibilityRecord r;
        r.e.e = rec.at("e").get<Vector>();
        r.q_star = rec.at("q_star").get<double>();
        r.eligible = rec.at("eligible").get<bool>();
        set.records.push_back(std::move(r));
    }
    if (data_summaries != nullptr && doc.contains("data_summaries")) {
        *data_summaries = matrix_from_json(doc.at("data_summaries"));
    }
    return set;
}

void write_qstar_csv(const fs::path& path, const EligibilitySet& set) {
    const std::size_t dims = set.box_e.dim();
    std::string out;
    for (std::size_t d = 0; d < dims; ++d) out += "e" + std::to_string(d + 1) + ",";
    out += "q_star,eligible\n";
    for (const auto& rec : set.records) {
        for (std::size_t d = 0; d < dims; ++d) out += format_double(rec.e.e[d], 12) + ",";
        out += format_double(rec.q_star, 12);
        out += rec.eligible ? ",1\n" : ",0\n";
    }
    write_text_file(path, out);
}

json reliability_to_json(const ReliabilityReport& report, double objective,
                         const Design& theta) {
    json doc;
    doc["theta"] = theta.theta;
    doc["objective"] = objective;
    json ranges = json::array();
    for (const auto& r : report.requirement_ranges) ranges.push_back({r[0], r[1]});
    doc["requirement_ranges"] = std::move(ranges);
    doc["any_range"] = {report.any_range[0], report.any_range[1]};
    doc["severities"] = report.severities;
    doc["skipped"] = report.skipped;
    return doc;
}

void write_rminmax_csv(const fs::path& path, const ReliabilityReport& report) {
    if (report.per_e.empty()) throw DomainError("empty reliability report");
    const std::size_t dims = report.per_e.front().e.e.size();
    std::string out;
    for (std::size_t d = 0; d < dims; ++d) out += "e" + std::to_string(d + 1) + ",";
    out += "r_min,r_max\n";
    for (const auto& row : report.per_e) {
        for (std::size_t d = 0; d < dims; ++d) out += format_double(row.e.e[d], 12) + ",";
        out += format_double(row.r_min, 12) + "," + format_double(row.r_max, 12) + "\n";
    }
    write_text_file(path, out);
}

void write_kw_trace_csv(const fs::path& path, const KWTrace& trace) {
    std::string out = "sweep,coordinate,up,down,gradient,objective_estimate\n";
    for (const auto& eval : trace.evals) {
        out += std::to_string(eval.sweep) + "," + std::to_string(eval.coord) + "," +
               format_double(eval.up, 12) + "," + format_double(eval.down, 12) + "," +
               format_double(eval.gradient, 12) + "," +
               format_double(0.5 * (eval.up + eval.down), 12) + "\n";
    }
    write_text_file(path, out);
}

std::string json_hash(const json& j) {
    const std::string dump = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace drocal
