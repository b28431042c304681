#ifndef SLICEMARL_IO_METRICS_CSV_HPP
#define SLICEMARL_IO_METRICS_CSV_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "slicemarl/harness/experiment.hpp"
#include "slicemarl/io/config_io.hpp"
#include "slicemarl/io/error.hpp"

namespace slicemarl::io {

inline constexpr const char* kMetricsHeader =
    "run_id,algorithm,seed,load_mbps,episode,mean_reward,mean_urllc_delay_s,mean_embb_throughput_bps";

/// Full-precision decimal rendering; parses back to the same double.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%#.17g", v);
    return buf;
}

/// 64-bit FNV-1a over the serialized config (which includes the seed).
inline std::string run_id(const ExperimentConfig& cfg) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : serialize_config(cfg)) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// The load column reports the URLLC offered load; sweeps set both slices
/// to the same value.
inline double load_of(const ExperimentConfig& cfg) { return cfg.network.urllc_load_mbps; }

/// `<algo>_load<L>_seed<S>.csv`
inline std::string metrics_file_name(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << to_string(cfg.algorithm) << "_load" << load_of(cfg) << "_seed" << cfg.seed << ".csv";
    return os.str();
}

inline void write_metrics_rows(std::ostream& os, const RunResult& r) {
    const std::string id = run_id(r.config);
    const std::string algo = to_string(r.config.algorithm);
    const std::string load = format_double(load_of(r.config));
    for (const auto& m : r.per_episode) {
        os << id << ',' << algo << ',' << r.config.seed << ',' << load << ',' << m.episode << ','
           << format_double(m.mean_reward) << ',' << format_double(m.mean_urllc_delay_s) << ','
           << format_double(m.mean_embb_throughput_bps) << '\n';
    }
}

/// Writes one row per episode. With `append`, rows go after any existing
/// content and the header is only written to an empty file.
inline std::size_t write_metrics(const RunResult& r, const std::filesystem::path& path, bool append = false) {
    bool need_header = true;
    if (append && std::filesystem::exists(path) && std::filesystem::file_size(path) > 0) {
        std::ifstream in(path);
        std::string first;
        std::getline(in, first);
        if (first != kMetricsHeader)
            throw Error(ErrorKind::Mismatch, path.string(), path.string() + ": existing header differs");
        need_header = false;
    }
    std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, path.string(), "cannot write " + path.string());
    if (need_header) out << kMetricsHeader << '\n';
    write_metrics_rows(out, r);
    out.flush();
    if (!out) throw Error(ErrorKind::Io, path.string(), "write failed: " + path.string());
    return r.per_episode.size();
}

struct MetricsRow {
    std::string run_id;
    Algorithm algorithm = Algorithm::Pvdn;
    std::uint64_t seed = 0;
    double load_mbps = 0;
    EpisodeMetrics metrics;
};

namespace detail {

inline double parse_double(const std::string& s, const std::string& where) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw Error(ErrorKind::Malformed, where, where + ": bad number '" + s + "'");
    return v;
}

inline std::uint64_t parse_uint(const std::string& s, const std::string& where) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || s[0] == '-' || end != s.c_str() + s.size())
        throw Error(ErrorKind::Malformed, where, where + ": bad integer '" + s + "'");
    return v;
}

} // namespace detail

inline std::vector<MetricsRow> read_metrics(std::istream& in, const std::string& name = "<stream>") {
    std::string line;
    if (!std::getline(in, line) || line != kMetricsHeader)
        throw Error(ErrorKind::Malformed, name, name + ": missing or unexpected header");
    std::vector<MetricsRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = name + ":" + std::to_string(lineno);
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 8) throw Error(ErrorKind::Malformed, where, where + ": expected 8 fields");
        MetricsRow r;
        r.run_id = f[0];
        const auto algo = parse_algorithm(f[1]);
        if (!algo) throw Error(ErrorKind::Malformed, where, where + ": unknown algorithm '" + f[1] + "'");
        r.algorithm = *algo;
        r.seed = detail::parse_uint(f[2], where);
        r.load_mbps = detail::parse_double(f[3], where);
        r.metrics.episode = static_cast<int>(detail::parse_uint(f[4], where));
        r.metrics.mean_reward = detail::parse_double(f[5], where);
        r.metrics.mean_urllc_delay_s = detail::parse_double(f[6], where);
        r.metrics.mean_embb_throughput_bps = detail::parse_double(f[7], where);
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::vector<MetricsRow> read_metrics(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::MissingFile, path.string(), "cannot open " + path.string());
    return read_metrics(in, path.string());
}

/// Regroups rows into runs by run_id, in order of first appearance. Each
/// run's config is `base` with the row's algorithm, seed and load applied;
/// converged-window stats are recomputed from the rows.
inline std::vector<RunResult> group_runs(const std::vector<MetricsRow>& rows, const ExperimentConfig& base) {
    std::vector<RunResult> runs;
    std::map<std::string, std::size_t> index;
    for (const auto& row : rows) {
        auto [it, fresh] = index.emplace(row.run_id, runs.size());
        if (fresh) {
            RunResult r;
            r.config = base;
            r.config.algorithm = row.algorithm;
            r.config.seed = row.seed;
            r.config.network.urllc_load_mbps = row.load_mbps;
            r.config.network.embb_load_mbps = row.load_mbps;
            runs.push_back(std::move(r));
        }
        RunResult& r = runs[it->second];
        if (row.algorithm != r.config.algorithm || row.seed != r.config.seed ||
            row.load_mbps != load_of(r.config))
            throw Error(ErrorKind::Mismatch, row.run_id, "run " + row.run_id + " has inconsistent keys");
        if (row.metrics.episode != static_cast<int>(r.per_episode.size()))
            throw Error(ErrorKind::Malformed, row.run_id, "run " + row.run_id + " episodes out of sequence");
        r.per_episode.push_back(row.metrics);
    }
    for (auto& r : runs) {
        r.config.episodes = static_cast<int>(r.per_episode.size());
        r.converged_window_stats = window_stats(r.per_episode);
    }
    return runs;
}

inline constexpr const char* kConfigFileName = "config.json";

/// Loads every metrics CSV in `dir`. A `config.json` there, if present,
/// supplies the base config for the reconstructed runs.
inline std::vector<RunResult> read_results_dir(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw Error(ErrorKind::MissingFile, dir.string(), "not a directory: " + dir.string());
    ExperimentConfig base;
    if (fs::exists(dir / kConfigFileName)) base = parse_config(dir / kConfigFileName);

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());

    std::vector<MetricsRow> rows;
    for (const auto& f : files) {
        std::ifstream in(f);
        std::string first;
        if (!std::getline(in, first) || first != kMetricsHeader) continue;
        auto part = read_metrics(f);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    if (rows.empty()) throw Error(ErrorKind::MissingFile, dir.string(), "no metrics files in " + dir.string());
    return group_runs(rows, base);
}

} // namespace slicemarl::io

#endif // SLICEMARL_IO_METRICS_CSV_HPP
