// Command-line front end: run, sweep, compare, figure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "slicemarl/harness/sweep.hpp"
#include "slicemarl/io/config_io.hpp"
#include "slicemarl/io/figures.hpp"
#include "slicemarl/io/lists.hpp"
#include "slicemarl/io/metrics_csv.hpp"

namespace fs = std::filesystem;
using namespace slicemarl;

namespace {

// One JSON object per line on stderr so scripts can parse failures.
void report_error(const std::string& kind, const std::string& key, const std::string& message) {
    nlohmann::json j{{"error", kind}, {"key", key}, {"message", message}};
    std::cerr << j.dump() << '\n';
}

ExperimentConfig load_config(const std::string& path) {
    return path.empty() ? ExperimentConfig{} : io::parse_config(path);
}

void prepare_out_dir(const fs::path& dir, const ExperimentConfig& base) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io::Error(io::ErrorKind::Io, dir.string(), "cannot create " + dir.string() + ": " + ec.message());
    const fs::path cfg = dir / io::kConfigFileName;
    std::ofstream out(cfg, std::ios::trunc);
    if (!out) throw io::Error(io::ErrorKind::Io, cfg.string(), "cannot write " + cfg.string());
    out << io::serialize_config(base);
}

void print_summary(const RunResult& r) {
    const auto& s = r.converged_window_stats;
    std::printf("%-11s load=%g seed=%llu  reward=%.4f  delay_ms=%.4f  embb_mbps=%.3f\n",
                to_string(r.config.algorithm), io::load_of(r.config),
                static_cast<unsigned long long>(r.config.seed), s.reward.mean, s.delay.mean * 1e3,
                s.throughput.mean / 1e6);
}

int cmd_run(const std::string& config, std::uint64_t seed, const std::string& algo, const std::string& out) {
    ExperimentConfig cfg = load_config(config);
    cfg.seed = seed;
    if (!algo.empty()) cfg.algorithm = io::parse_algorithms(algo, "algo").front();
    prepare_out_dir(out, cfg);
    const RunResult r = run_experiment(cfg);
    io::write_metrics(r, fs::path(out) / io::metrics_file_name(cfg));
    print_summary(r);
    return 0;
}

int cmd_sweep(const std::string& config, const std::string& loads, const std::string& algos,
              const std::string& seeds, const std::string& out, unsigned jobs) {
    const ExperimentConfig base = load_config(config);
    const auto load_list = io::parse_loads(loads);
    const auto algo_list = io::parse_algorithms(algos);
    const auto seed_list = io::parse_seeds(seeds);
    prepare_out_dir(out, base);

    int failures = 0;
    sweep(base, load_list, algo_list, seed_list, jobs, [&](const SweepCell& c) {
        if (!c.result) {
            ++failures;
            report_error("run", to_string(c.key), c.error);
            return;
        }
        io::write_metrics(*c.result, fs::path(out) / io::metrics_file_name(c.result->config));
        print_summary(*c.result);
        std::fflush(stdout);
    });
    if (failures > 0) {
        report_error("run", "sweep", std::to_string(failures) + " cell(s) failed");
        return 1;
    }
    return 0;
}

int cmd_compare(const std::string& in, const std::string& metric_name) {
    const auto metric = parse_metric(metric_name);
    if (!metric) throw io::Error(io::ErrorKind::Malformed, "metric", "unknown metric " + metric_name);
    const auto runs = io::read_results_dir(in);

    std::map<double, std::vector<RunResult>> by_load;
    for (const auto& r : runs) by_load[io::load_of(r.config)].push_back(r);

    for (const auto& [load, group] : by_load) {
        const CompareReport rep = compare(group, *metric);
        std::printf("load_mbps=%g metric=%s\n", load, to_string(*metric));
        for (const auto& s : rep.algorithms)
            std::printf("  %-11s mean=%.9g seeds=%zu\n", to_string(s.algorithm), s.mean, s.per_seed.size());
        for (const auto& p : rep.pairs)
            std::printf("  %-11s vs %-11s delta=%+.2f%% wins=%d/%d\n", to_string(p.a), to_string(p.b),
                        p.delta * 100, p.wins, p.seeds);
    }
    return 0;
}

int cmd_figure(const std::string& in, const std::string& which, const std::string& out,
               const std::optional<double>& load) {
    const auto fig = io::parse_figure(which);
    if (!fig) throw io::Error(io::ErrorKind::Malformed, "which", "unknown figure " + which);
    const auto runs = io::read_results_dir(in);
    const auto data = io::emit_figure_data(runs, *fig, out, load);
    std::printf("%s: %zu rows x %zu series -> %s\n", io::to_string(*fig), data.x.size(), data.series.size(),
                out.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Network-slicing MARL simulator: independent Q-learning, VDN and PVDN"};
    app.require_subcommand(1);

    std::string config, out, in, algo, loads = "1,2,3", algos = "independent,vdn,pvdn", seeds = "0..9";
    std::string metric = "delay", which;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    std::optional<double> load;

    auto* run = app.add_subcommand("run", "Train one algorithm and write its per-episode metrics");
    run->add_option("--config", config, "JSON config file (defaults when omitted)");
    run->add_option("--seed", seed, "Random seed");
    run->add_option("--algo", algo, "Override the config's algorithm");
    run->add_option("--out", out, "Output directory")->required();

    auto* sw = app.add_subcommand("sweep", "Run every load x algorithm x seed combination");
    sw->add_option("--config", config, "JSON config file (defaults when omitted)");
    sw->add_option("--loads", loads, "Offered loads in Mbps, e.g. 1,2,3");
    sw->add_option("--algos", algos, "Algorithms, e.g. independent,vdn,pvdn");
    sw->add_option("--seeds", seeds, "Seeds, e.g. 0..9 or 1,4,7");
    sw->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    sw->add_option("--out", out, "Output directory")->required();

    auto* cmp = app.add_subcommand("compare", "Compare converged-window means across algorithms");
    cmp->add_option("--in", in, "Directory of metrics files")->required();
    cmp->add_option("--metric", metric, "delay, throughput or reward");

    auto* fig = app.add_subcommand("figure", "Emit figure data as CSV");
    fig->add_option("--in", in, "Directory of metrics files")->required();
    fig->add_option("--which", which, "convergence, latency or throughput")->required();
    fig->add_option("--out", out, "Output CSV file")->required();
    fig->add_option("--load", load, "Load to plot when the input spans several (convergence only)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        report_error("usage", "", e.what());
        return 2;
    }

    try {
        if (*run) return cmd_run(config, seed, algo, out);
        if (*sw) return cmd_sweep(config, loads, algos, seeds, out, jobs);
        if (*cmp) return cmd_compare(in, metric);
        if (*fig) return cmd_figure(in, which, out, load);
    } catch (const io::Error& e) {
        report_error(io::to_string(e.kind()), e.key(), e.what());
    } catch (const ConstraintError& e) {
        report_error("constraint", e.key(), e.what());
    } catch (const ConfigMismatch& e) {
        report_error("mismatch", "", e.what());
    } catch (const EpisodeError& e) {
        report_error("run", "episode=" + std::to_string(e.episode()), e.what());
    } catch (const std::exception& e) {
        report_error("internal", "", e.what());
    }
    return 1;
}
