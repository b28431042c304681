#ifndef SLICEMARL_HARNESS_SWEEP_HPP
#define SLICEMARL_HARNESS_SWEEP_HPP

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "slicemarl/harness/experiment.hpp"

namespace slicemarl {

struct SweepKey {
    double load_mbps = 0;
    Algorithm algorithm = Algorithm::Pvdn;
    std::uint64_t seed = 0;

    bool operator==(const SweepKey&) const = default;
};

inline std::string to_string(const SweepKey& k) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s@load=%g,seed=%llu", to_string(k.algorithm), k.load_mbps,
                  static_cast<unsigned long long>(k.seed));
    return buf;
}

/// One grid cell: either a result or the error that stopped it.
struct SweepCell {
    SweepKey key;
    std::optional<RunResult> result;
    std::string error;
};

inline ExperimentConfig cell_config(const ExperimentConfig& base, const SweepKey& k) {
    ExperimentConfig cfg = base;
    cfg.network.urllc_load_mbps = k.load_mbps;
    cfg.network.embb_load_mbps = k.load_mbps;
    cfg.algorithm = k.algorithm;
    cfg.seed = k.seed;
    return cfg;
}

/// Cartesian product loads x algorithms x seeds, in that nesting order.
/// Both slices' offered load is set to each load value. Cells are
/// independent runs; a failing cell records its error and the rest still
/// run. `jobs` > 1 runs cells on worker threads; results do not depend on
/// it. `on_done` is called once per finished cell (serialised).
inline std::vector<SweepCell> sweep(const ExperimentConfig& base, const std::vector<double>& loads_mbps,
                                    const std::vector<Algorithm>& algorithms,
                                    const std::vector<std::uint64_t>& seeds, unsigned jobs = 1,
                                    const std::function<void(const SweepCell&)>& on_done = {}) {
    if (loads_mbps.empty() || algorithms.empty() || seeds.empty())
        throw std::invalid_argument("sweep needs at least one load, algorithm and seed");

    std::vector<SweepCell> cells;
    for (double l : loads_mbps)
        for (Algorithm a : algorithms)
            for (std::uint64_t s : seeds) cells.push_back({{l, a, s}, std::nullopt, {}});

    std::atomic<std::size_t> next{0};
    std::mutex done_mu;
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            SweepCell& c = cells[i];
            try {
                c.result = run_experiment(cell_config(base, c.key));
            } catch (const std::exception& e) {
                c.error = e.what();
            }
            if (on_done) {
                std::lock_guard lock(done_mu);
                on_done(c);
            }
        }
    };

    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cells.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return cells;
}

enum class Metric { Reward, Delay, Throughput };

inline const char* to_string(Metric m) {
    switch (m) {
    case Metric::Reward: return "reward";
    case Metric::Delay: return "delay";
    case Metric::Throughput: return "throughput";
    }
    return "?";
}

inline std::optional<Metric> parse_metric(const std::string& s) {
    if (s == "reward") return Metric::Reward;
    if (s == "delay") return Metric::Delay;
    if (s == "throughput") return Metric::Throughput;
    return std::nullopt;
}

inline bool lower_is_better(Metric m) { return m == Metric::Delay; }

inline double converged_mean(const RunResult& r, Metric m) {
    const auto& s = r.converged_window_stats;
    switch (m) {
    case Metric::Reward: return s.reward.mean;
    case Metric::Delay: return s.delay.mean;
    case Metric::Throughput: return s.throughput.mean;
    }
    return 0;
}

/// (a - b) / b. Zero when both are zero, infinite when only b is.
inline double relative_delta(double a, double b) {
    if (b == 0) return a == 0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), a);
    return (a - b) / b;
}

class ConfigMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct AlgorithmSummary {
    Algorithm algorithm = Algorithm::Pvdn;
    double mean = 0;                          // mean over seeds of converged means
    std::map<std::uint64_t, double> per_seed;  // converged mean per seed
};

struct PairwiseDelta {
    Algorithm a = Algorithm::Pvdn;
    Algorithm b = Algorithm::Pvdn;
    double delta = 0;  // relative_delta(mean_a, mean_b)
    int wins = 0;      // seeds where a beats b on the metric
    int seeds = 0;     // seeds both algorithms ran
};

struct CompareReport {
    Metric metric = Metric::Reward;
    std::vector<AlgorithmSummary> algorithms;  // in kAllAlgorithms order
    std::vector<PairwiseDelta> pairs;          // every ordered pair a != b

    const AlgorithmSummary* find(Algorithm a) const {
        for (const auto& s : algorithms)
            if (s.algorithm == a) return &s;
        return nullptr;
    }

    const PairwiseDelta* find(Algorithm a, Algorithm b) const {
        for (const auto& p : pairs)
            if (p.a == a && p.b == b) return &p;
        return nullptr;
    }
};

/// Converged-window comparison of runs that differ only in algorithm and
/// seed. Each (algorithm, seed) may appear once.
inline CompareReport compare(const std::vector<RunResult>& results, Metric metric) {
    if (results.empty()) throw std::invalid_argument("compare needs at least one result");
    auto strip = [](ExperimentConfig c) {
        c.algorithm = Algorithm::Pvdn;
        c.seed = 0;
        return c;
    };
    const ExperimentConfig ref = strip(results.front().config);
    for (const auto& r : results)
        if (!(strip(r.config) == ref))
            throw ConfigMismatch("results differ in more than algorithm and seed");

    CompareReport rep;
    rep.metric = metric;
    for (Algorithm a : kAllAlgorithms) {
        AlgorithmSummary s;
        s.algorithm = a;
        for (const auto& r : results) {
            if (r.config.algorithm != a) continue;
            if (!s.per_seed.emplace(r.config.seed, converged_mean(r, metric)).second)
                throw ConfigMismatch(std::string("duplicate run for ") + to_string(a) + " seed " +
                                     std::to_string(r.config.seed));
        }
        if (s.per_seed.empty()) continue;
        for (const auto& [seed, v] : s.per_seed) s.mean += v;
        s.mean /= static_cast<double>(s.per_seed.size());
        rep.algorithms.push_back(std::move(s));
    }

    for (const auto& x : rep.algorithms) {
        for (const auto& y : rep.algorithms) {
            if (x.algorithm == y.algorithm) continue;
            PairwiseDelta p;
            p.a = x.algorithm;
            p.b = y.algorithm;
            p.delta = relative_delta(x.mean, y.mean);
            for (const auto& [seed, va] : x.per_seed) {
                const auto it = y.per_seed.find(seed);
                if (it == y.per_seed.end()) continue;
                ++p.seeds;
                if (lower_is_better(metric) ? va < it->second : va > it->second) ++p.wins;
            }
            rep.pairs.push_back(p);
        }
    }
    return rep;
}

} // namespace slicemarl

#endif // SLICEMARL_HARNESS_SWEEP_HPP
