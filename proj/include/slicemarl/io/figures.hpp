#ifndef SLICEMARL_IO_FIGURES_HPP
#define SLICEMARL_IO_FIGURES_HPP

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "slicemarl/harness/sweep.hpp"
#include "slicemarl/io/error.hpp"
#include "slicemarl/io/metrics_csv.hpp"

namespace slicemarl::io {

enum class Figure { Convergence, LatencyVsLoad, ThroughputVsLoad };

inline const char* to_string(Figure f) {
    switch (f) {
    case Figure::Convergence: return "convergence";
    case Figure::LatencyVsLoad: return "latency_vs_load";
    case Figure::ThroughputVsLoad: return "throughput_vs_load";
    }
    return "?";
}

inline std::optional<Figure> parse_figure(const std::string& s) {
    if (s == "convergence") return Figure::Convergence;
    if (s == "latency" || s == "latency_vs_load") return Figure::LatencyVsLoad;
    if (s == "throughput" || s == "throughput_vs_load") return Figure::ThroughputVsLoad;
    return std::nullopt;
}

/// One x column plus one y series per algorithm, all the same length.
struct FigureData {
    std::string x_label;
    std::vector<double> x;
    std::vector<std::string> labels;
    std::vector<std::vector<double>> series;
};

/// Trailing moving average; the first window-1 points average what exists.
inline std::vector<double> moving_average(const std::vector<double>& v, std::size_t window) {
    std::vector<double> out(v.size());
    double sum = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        sum += v[i];
        if (i >= window) sum -= v[i - window];
        out[i] = sum / static_cast<double>(std::min(i + 1, window));
    }
    return out;
}

namespace detail {

inline std::string join(const std::vector<std::string>& parts) {
    std::string s;
    for (const auto& p : parts) s += (s.empty() ? "" : ",") + p;
    return s;
}

inline std::string load_key(Algorithm a, double load) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s@load=%g", to_string(a), load);
    return buf;
}

inline FigureData convergence(const std::vector<RunResult>& results, const std::vector<Algorithm>& algos,
                              std::optional<double> load) {
    std::set<double> loads;
    for (const auto& r : results) loads.insert(load_of(r.config));
    if (!load) {
        if (loads.size() > 1)
            throw Error(ErrorKind::Mismatch, "load", "results span several loads; choose one");
        load = loads.empty() ? 0.0 : *loads.begin();
    }

    FigureData f;
    f.x_label = "episode";
    std::vector<std::string> missing;
    std::size_t episodes = 0;
    for (Algorithm a : algos) {
        std::vector<const RunResult*> runs;
        for (const auto& r : results)
            if (r.config.algorithm == a && load_of(r.config) == *load) runs.push_back(&r);
        if (runs.empty()) {
            missing.push_back(to_string(a));
            continue;
        }
        if (episodes == 0) episodes = runs.front()->per_episode.size();
        std::vector<double> y(episodes, 0.0);
        for (const RunResult* r : runs) {
            if (r->per_episode.size() != episodes)
                throw Error(ErrorKind::Mismatch, to_string(a), "runs differ in episode count");
            for (std::size_t e = 0; e < episodes; ++e) y[e] += r->per_episode[e].mean_reward;
        }
        for (auto& v : y) v /= static_cast<double>(runs.size());
        f.labels.push_back(to_string(a));
        f.series.push_back(std::move(y));
    }
    if (!missing.empty())
        throw Error(ErrorKind::Coverage, join(missing), "missing algorithms: " + join(missing));
    for (std::size_t e = 0; e < episodes; ++e) f.x.push_back(static_cast<double>(e));
    return f;
}

inline FigureData versus_load(const std::vector<RunResult>& results, const std::vector<Algorithm>& algos,
                              Metric metric) {
    std::set<double> loads;
    for (const auto& r : results) loads.insert(load_of(r.config));

    FigureData f;
    f.x_label = "load_mbps";
    f.x.assign(loads.begin(), loads.end());
    std::vector<std::string> missing;
    for (Algorithm a : algos) {
        bool any = false;
        std::vector<std::string> gaps;
        std::vector<double> y;
        for (double l : loads) {
            double sum = 0;
            int n = 0;
            for (const auto& r : results) {
                if (r.config.algorithm != a || load_of(r.config) != l) continue;
                sum += converged_mean(r, metric);
                ++n;
            }
            if (n == 0) gaps.push_back(load_key(a, l));
            any = any || n > 0;
            y.push_back(n > 0 ? sum / n : 0.0);
        }
        if (!any)
            missing.push_back(to_string(a));
        else
            missing.insert(missing.end(), gaps.begin(), gaps.end());
        f.labels.push_back(to_string(a));
        f.series.push_back(std::move(y));
    }
    if (!missing.empty())
        throw Error(ErrorKind::Coverage, join(missing), "missing coverage: " + join(missing));
    return f;
}

inline void write_csv(const FigureData& f, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, path.string(), "cannot write " + path.string());
    out << f.x_label;
    for (const auto& l : f.labels) out << ',' << l;
    out << '\n';
    for (std::size_t i = 0; i < f.x.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", f.x[i]);
        out << buf;
        for (const auto& s : f.series) out << ',' << format_double(s[i]);
        out << '\n';
    }
    if (!out) throw Error(ErrorKind::Io, path.string(), "write failed: " + path.string());
}

} // namespace detail

inline FigureData build_figure(const std::vector<RunResult>& results, Figure figure,
                               const std::vector<Algorithm>& algorithms = {kAllAlgorithms.begin(),
                                                                           kAllAlgorithms.end()},
                               std::optional<double> load = std::nullopt) {
    switch (figure) {
    case Figure::Convergence: return detail::convergence(results, algorithms, load);
    case Figure::LatencyVsLoad: return detail::versus_load(results, algorithms, Metric::Delay);
    case Figure::ThroughputVsLoad: return detail::versus_load(results, algorithms, Metric::Throughput);
    }
    throw std::invalid_argument("unknown figure");
}

/// Path of the smoothed companion file: `conv.csv` -> `conv_ma20.csv`.
inline std::filesystem::path smoothed_path(const std::filesystem::path& path) {
    auto p = path;
    p.replace_filename(path.stem().string() + "_ma20" + path.extension().string());
    return p;
}

/// Writes the figure as CSV (x column then one column per algorithm). The
/// convergence figure also gets a 20-episode moving-average companion.
inline FigureData emit_figure_data(const std::vector<RunResult>& results, Figure figure,
                                   const std::filesystem::path& path,
                                   std::optional<double> load = std::nullopt) {
    FigureData f = build_figure(results, figure, {kAllAlgorithms.begin(), kAllAlgorithms.end()}, load);
    detail::write_csv(f, path);
    if (figure == Figure::Convergence) {
        FigureData smooth = f;
        for (auto& s : smooth.series) s = moving_average(s, 20);
        detail::write_csv(smooth, smoothed_path(path));
    }
    return f;
}

} // namespace slicemarl::io

#endif // SLICEMARL_IO_FIGURES_HPP
