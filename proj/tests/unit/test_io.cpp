#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "slicemarl/harness/experiment.hpp"
#include "slicemarl/io/config_io.hpp"
#include "slicemarl/io/figures.hpp"
#include "slicemarl/io/lists.hpp"
#include "slicemarl/io/metrics_csv.hpp"

using namespace slicemarl;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        path_ = fs::temp_directory_path() /
                (std::string("slicemarl_") + info->test_suite_name() + "_" + info->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
}

io::ErrorKind kind_of(const std::string& text, std::string* key = nullptr) {
    try {
        io::config_from_string(text);
    } catch (const io::Error& e) {
        if (key) *key = e.key();
        return e.kind();
    }
    ADD_FAILURE() << "no error for: " << text;
    return io::ErrorKind::Io;
}

ExperimentConfig small(Algorithm a, std::uint64_t seed, double load = 2.0, int episodes = 30) {
    ExperimentConfig c;
    c.algorithm = a;
    c.seed = seed;
    c.episodes = episodes;
    c.ttis_per_episode = 50;
    c.network.urllc_load_mbps = load;
    c.network.embb_load_mbps = load;
    return c;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

} // namespace

TEST(ConfigIo, BlankDocumentIsTheDefault) {
    EXPECT_EQ(io::config_from_string(""), ExperimentConfig{});
    EXPECT_EQ(io::config_from_string("  \n\t"), ExperimentConfig{});
    EXPECT_EQ(io::config_from_string("{}"), ExperimentConfig{});
}

TEST(ConfigIo, PartialSectionsOverrideOnlyTheirKeys) {
    const auto c = io::config_from_string(R"({"network": {"urllc_load_mbps": 3.5},
                                               "learner": {"epsilon": 0.1},
                                               "run": {"algorithm": "vdn", "seed": 42, "episodes": 7}})");
    ExperimentConfig want;
    want.network.urllc_load_mbps = 3.5;
    want.learner.epsilon = 0.1;
    want.algorithm = Algorithm::Vdn;
    want.seed = 42;
    want.episodes = 7;
    EXPECT_EQ(c, want);
}

TEST(ConfigIo, ConstraintViolationNamesTheKey) {
    std::string key;
    EXPECT_EQ(kind_of(R"({"learner": {"epsilon": 1.5}})", &key), io::ErrorKind::Constraint);
    EXPECT_EQ(key, "learner.epsilon");
    EXPECT_EQ(kind_of(R"({"network": {"bler": -0.1}})", &key), io::ErrorKind::Constraint);
    EXPECT_EQ(key, "network.bler");
    EXPECT_EQ(kind_of(R"({"run": {"episodes": 0}})", &key), io::ErrorKind::Constraint);
    EXPECT_EQ(key, "run.episodes");
}

TEST(ConfigIo, UnknownKeysAreRejected) {
    std::string key;
    EXPECT_EQ(kind_of(R"({"netwrok": {}})", &key), io::ErrorKind::UnknownKey);
    EXPECT_EQ(key, "netwrok");
    EXPECT_EQ(kind_of(R"({"network": {"foo": 1}})", &key), io::ErrorKind::UnknownKey);
    EXPECT_EQ(key, "network.foo");
}

TEST(ConfigIo, MalformedDocuments) {
    EXPECT_EQ(kind_of("{\"network\": "), io::ErrorKind::Malformed);
    EXPECT_EQ(kind_of("[1, 2]"), io::ErrorKind::Malformed);
    EXPECT_EQ(kind_of("nope"), io::ErrorKind::Malformed);
}

TEST(ConfigIo, WrongTypesNameTheKey) {
    std::string key;
    EXPECT_EQ(kind_of(R"({"network": {"num_rbgs": 13.5}})", &key), io::ErrorKind::Constraint);
    EXPECT_EQ(key, "network.num_rbgs");
    EXPECT_EQ(kind_of(R"({"network": {"fading_enabled": 1}})", &key), io::ErrorKind::Constraint);
    EXPECT_EQ(key, "network.fading_enabled");
    EXPECT_EQ(kind_of(R"({"learner": {"alpha": "big"}})", &key), io::ErrorKind::Constraint);
    EXPECT_EQ(key, "learner.alpha");
    EXPECT_EQ(kind_of(R"({"run": {"seed": -1}})", &key), io::ErrorKind::Constraint);
    EXPECT_EQ(key, "run.seed");
    EXPECT_EQ(kind_of(R"({"run": {"algorithm": "dqn"}})", &key), io::ErrorKind::Constraint);
    EXPECT_EQ(key, "run.algorithm");
    EXPECT_EQ(kind_of(R"({"learner": 3})", &key), io::ErrorKind::Constraint);
    EXPECT_EQ(key, "learner");
}

TEST(ConfigIo, MissingFile) {
    try {
        io::parse_config("/nonexistent/slicemarl/config.json");
        FAIL();
    } catch (const io::Error& e) {
        EXPECT_EQ(e.kind(), io::ErrorKind::MissingFile);
    }
}

TEST(ConfigIo, SerializeRoundTrips) {
    ExperimentConfig c;
    c.network.urllc_load_mbps = 0.1;
    c.network.d_tar_s = 1.0 / 3.0;
    c.network.fading_enabled = false;
    c.learner.n_step = 3;
    c.algorithm = Algorithm::Independent;
    c.seed = 18446744073709551615ull;
    const std::string text = io::serialize_config(c);
    EXPECT_EQ(io::config_from_string(text), c);
    EXPECT_EQ(io::serialize_config(io::config_from_string(text)), text);

    TempDir dir;
    spit(dir.path() / "c.json", text);
    EXPECT_EQ(io::parse_config(dir.path() / "c.json"), c);
}

TEST(MetricsCsv, GoldenHeader) {
    EXPECT_STREQ(io::kMetricsHeader,
                 "run_id,algorithm,seed,load_mbps,episode,mean_reward,mean_urllc_delay_s,mean_embb_throughput_bps");
}

TEST(MetricsCsv, OneRowPerEpisode) {
    TempDir dir;
    auto c = small(Algorithm::Pvdn, 3, 2.0, 500);
    c.ttis_per_episode = 10;
    const RunResult r = run_experiment(c);
    const fs::path p = dir.path() / io::metrics_file_name(c);
    EXPECT_EQ(p.filename(), "pvdn_load2_seed3.csv");
    EXPECT_EQ(io::write_metrics(r, p), 500u);
    const std::string text = slurp(p);
    EXPECT_EQ(count_lines(text), 501u);
    EXPECT_EQ(text.substr(0, text.find('\n')), io::kMetricsHeader);
}

TEST(MetricsCsv, SameSeedGivesIdenticalBytes) {
    TempDir dir;
    for (Algorithm a : kAllAlgorithms) {
        const auto c = small(a, 11);
        io::write_metrics(run_experiment(c), dir.path() / "a.csv");
        io::write_metrics(run_experiment(c), dir.path() / "b.csv");
        EXPECT_EQ(slurp(dir.path() / "a.csv"), slurp(dir.path() / "b.csv")) << to_string(a);
        io::write_metrics(run_experiment(small(a, 12)), dir.path() / "c.csv");
        EXPECT_NE(slurp(dir.path() / "a.csv"), slurp(dir.path() / "c.csv")) << to_string(a);
    }
}

TEST(MetricsCsv, ReadBackIsExact) {
    TempDir dir;
    const auto c = small(Algorithm::Vdn, 4);
    const RunResult r = run_experiment(c);
    const fs::path p = dir.path() / "m.csv";
    io::write_metrics(r, p);
    const auto rows = io::read_metrics(p);
    ASSERT_EQ(rows.size(), r.per_episode.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].run_id, io::run_id(c));
        EXPECT_EQ(rows[i].algorithm, Algorithm::Vdn);
        EXPECT_EQ(rows[i].seed, 4u);
        EXPECT_EQ(rows[i].load_mbps, 2.0);
        EXPECT_EQ(rows[i].metrics.episode, static_cast<int>(i));
        EXPECT_EQ(rows[i].metrics.mean_reward, r.per_episode[i].mean_reward);
        EXPECT_EQ(rows[i].metrics.mean_urllc_delay_s, r.per_episode[i].mean_urllc_delay_s);
        EXPECT_EQ(rows[i].metrics.mean_embb_throughput_bps, r.per_episode[i].mean_embb_throughput_bps);
    }

    const auto runs = io::group_runs(rows, c);
    ASSERT_EQ(runs.size(), 1u);
    EXPECT_EQ(runs[0].config, c);
    EXPECT_EQ(runs[0].converged_window_stats.delay.mean, r.converged_window_stats.delay.mean);
    io::write_metrics(runs[0], dir.path() / "again.csv");
    EXPECT_EQ(slurp(p), slurp(dir.path() / "again.csv"));
}

TEST(MetricsCsv, AwkwardValuesSurviveTheRoundTrip) {
    RunResult r;
    r.config = small(Algorithm::Pvdn, 0);
    const double values[] = {0.1, 1.0 / 3.0, 5e-324, 1.7976931348623157e308, -0.0, 123456789.123456789};
    for (int i = 0; i < 6; ++i) {
        EpisodeMetrics m;
        m.episode = i;
        m.mean_reward = values[i];
        m.mean_urllc_delay_s = values[5 - i];
        m.mean_embb_throughput_bps = -values[i];
        r.per_episode.push_back(m);
    }
    std::stringstream ss;
    ss << io::kMetricsHeader << '\n';
    io::write_metrics_rows(ss, r);
    const auto rows = io::read_metrics(ss);
    ASSERT_EQ(rows.size(), 6u);
    for (int i = 0; i < 6; ++i) {
        EXPECT_EQ(rows[i].metrics.mean_reward, values[i]);
        EXPECT_EQ(rows[i].metrics.mean_urllc_delay_s, values[5 - i]);
        EXPECT_EQ(rows[i].metrics.mean_embb_throughput_bps, -values[i]);
    }
}

TEST(MetricsCsv, AppendWritesHeaderOnce) {
    TempDir dir;
    const fs::path p = dir.path() / "all.csv";
    const RunResult a = run_experiment(small(Algorithm::Vdn, 1, 2.0, 5));
    const RunResult b = run_experiment(small(Algorithm::Pvdn, 1, 2.0, 5));
    io::write_metrics(a, p, true);
    io::write_metrics(b, p, true);
    EXPECT_EQ(count_lines(slurp(p)), 11u);
    const auto runs = io::group_runs(io::read_metrics(p), ExperimentConfig{});
    ASSERT_EQ(runs.size(), 2u);
    EXPECT_EQ(runs[0].config.algorithm, Algorithm::Vdn);
    EXPECT_EQ(runs[1].config.algorithm, Algorithm::Pvdn);

    spit(p, "something,else\n");
    EXPECT_THROW(io::write_metrics(a, p, true), io::Error);
}

TEST(MetricsCsv, ReaderRejectsBadInput) {
    auto kind = [](const std::string& text) {
        std::istringstream in(text);
        try {
            io::read_metrics(in);
        } catch (const io::Error& e) {
            return e.kind();
        }
        return io::ErrorKind::Io;
    };
    const std::string h = std::string(io::kMetricsHeader) + "\n";
    EXPECT_EQ(kind(""), io::ErrorKind::Malformed);
    EXPECT_EQ(kind("wrong\n"), io::ErrorKind::Malformed);
    EXPECT_EQ(kind(h + "x,vdn,0,1,0,1,2\n"), io::ErrorKind::Malformed);
    EXPECT_EQ(kind(h + "x,dqn,0,1,0,1,2,3\n"), io::ErrorKind::Malformed);
    EXPECT_EQ(kind(h + "x,vdn,0,1,0,one,2,3\n"), io::ErrorKind::Malformed);
    EXPECT_EQ(kind(h + "x,vdn,-1,1,0,1,2,3\n"), io::ErrorKind::Malformed);

    std::istringstream gap(h + "x,vdn,0,1,0,1,2,3\nx,vdn,0,1,2,1,2,3\n");
    EXPECT_THROW(io::group_runs(io::read_metrics(gap), ExperimentConfig{}), io::Error);
    std::istringstream clash(h + "x,vdn,0,1,0,1,2,3\nx,pvdn,0,1,1,1,2,3\n");
    EXPECT_THROW(io::group_runs(io::read_metrics(clash), ExperimentConfig{}), io::Error);
}

TEST(MetricsCsv, RunIdFollowsTheConfig) {
    const auto a = small(Algorithm::Vdn, 1);
    auto b = a;
    EXPECT_EQ(io::run_id(a), io::run_id(b));
    EXPECT_EQ(io::run_id(a).size(), 16u);
    b.seed = 2;
    EXPECT_NE(io::run_id(a), io::run_id(b));
}

TEST(Lists, Parsing) {
    EXPECT_EQ(io::parse_loads("1,2,3"), (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(io::parse_loads("0.5"), (std::vector<double>{0.5}));
    EXPECT_EQ(io::parse_seeds("0..3,7"), (std::vector<std::uint64_t>{0, 1, 2, 3, 7}));
    EXPECT_EQ(io::parse_seeds("5..5"), (std::vector<std::uint64_t>{5}));
    EXPECT_EQ(io::parse_algorithms("pvdn,independent"),
              (std::vector<Algorithm>{Algorithm::Pvdn, Algorithm::Independent}));
    EXPECT_THROW(io::parse_loads("1,,2"), io::Error);
    EXPECT_THROW(io::parse_loads("-1"), io::Error);
    EXPECT_THROW(io::parse_loads(""), io::Error);
    EXPECT_THROW(io::parse_seeds("3..1"), io::Error);
    EXPECT_THROW(io::parse_seeds("a"), io::Error);
    EXPECT_THROW(io::parse_algorithms("vdn,qmix"), io::Error);
}

class FigureTest : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        for (double load : {1.0, 2.0, 3.0})
            for (Algorithm a : kAllAlgorithms)
                for (std::uint64_t s : {0u, 1u}) runs_.push_back(run_experiment(small(a, s, load, 40)));
    }
    static std::vector<RunResult> at_load(double load) {
        std::vector<RunResult> out;
        for (const auto& r : runs_)
            if (io::load_of(r.config) == load) out.push_back(r);
        return out;
    }
    static inline std::vector<RunResult> runs_;
};

TEST_F(FigureTest, ConvergenceAveragesSeeds) {
    const auto runs = at_load(2.0);
    const auto f = io::build_figure(runs, io::Figure::Convergence);
    ASSERT_EQ(f.x.size(), 40u);
    ASSERT_EQ(f.series.size(), 3u);
    EXPECT_EQ(f.labels, (std::vector<std::string>{"independent", "vdn", "pvdn"}));
    for (std::size_t k = 0; k < 3; ++k) {
        std::vector<const RunResult*> mine;
        for (const auto& r : runs)
            if (r.config.algorithm == kAllAlgorithms[k]) mine.push_back(&r);
        ASSERT_EQ(mine.size(), 2u);
        for (std::size_t e = 0; e < 40; ++e)
            EXPECT_DOUBLE_EQ(f.series[k][e],
                             (mine[0]->per_episode[e].mean_reward + mine[1]->per_episode[e].mean_reward) / 2);
    }
}

TEST_F(FigureTest, ConvergenceNeedsALoadWhenSeveralExist) {
    try {
        io::build_figure(runs_, io::Figure::Convergence);
        FAIL();
    } catch (const io::Error& e) {
        EXPECT_EQ(e.kind(), io::ErrorKind::Mismatch);
        EXPECT_EQ(e.key(), "load");
    }
    EXPECT_EQ(io::build_figure(runs_, io::Figure::Convergence, {kAllAlgorithms.begin(), kAllAlgorithms.end()}, 3.0).x.size(),
              40u);
}

TEST_F(FigureTest, LatencyVersusLoad) {
    const auto f = io::build_figure(runs_, io::Figure::LatencyVsLoad);
    EXPECT_EQ(f.x, (std::vector<double>{1, 2, 3}));
    ASSERT_EQ(f.series.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) {
        ASSERT_EQ(f.series[k].size(), 3u);
        for (std::size_t i = 0; i < 3; ++i) {
            double sum = 0;
            int n = 0;
            for (const auto& r : runs_)
                if (r.config.algorithm == kAllAlgorithms[k] && io::load_of(r.config) == f.x[i]) {
                    sum += r.converged_window_stats.delay.mean;
                    ++n;
                }
            EXPECT_EQ(n, 2);
            EXPECT_DOUBLE_EQ(f.series[k][i], sum / n);
        }
    }
    const auto t = io::build_figure(runs_, io::Figure::ThroughputVsLoad);
    EXPECT_GT(t.series[0][0], 1e6);
}

TEST_F(FigureTest, MissingAlgorithmsAreNamed) {
    std::vector<RunResult> only_independent;
    for (const auto& r : at_load(1.0))
        if (r.config.algorithm == Algorithm::Independent) only_independent.push_back(r);
    for (io::Figure fig : {io::Figure::Convergence, io::Figure::LatencyVsLoad}) {
        try {
            io::build_figure(only_independent, fig);
            FAIL();
        } catch (const io::Error& e) {
            EXPECT_EQ(e.kind(), io::ErrorKind::Coverage);
            EXPECT_EQ(e.key(), "vdn,pvdn");
        }
    }

    std::vector<RunResult> holey;
    for (const auto& r : runs_)
        if (!(r.config.algorithm == Algorithm::Vdn && io::load_of(r.config) == 2.0)) holey.push_back(r);
    try {
        io::build_figure(holey, io::Figure::ThroughputVsLoad);
        FAIL();
    } catch (const io::Error& e) {
        EXPECT_EQ(e.kind(), io::ErrorKind::Coverage);
        EXPECT_EQ(e.key(), "vdn@load=2");
    }
}

TEST_F(FigureTest, EmitWritesSmoothedCompanion) {
    TempDir dir;
    const fs::path p = dir.path() / "conv.csv";
    io::emit_figure_data(at_load(1.0), io::Figure::Convergence, p);
    const fs::path ma = dir.path() / "conv_ma20.csv";
    ASSERT_TRUE(fs::exists(ma));
    const std::string raw = slurp(p), smooth = slurp(ma);
    EXPECT_EQ(raw.substr(0, raw.find('\n')), "episode,independent,vdn,pvdn");
    EXPECT_EQ(count_lines(raw), 41u);
    EXPECT_EQ(count_lines(smooth), 41u);
    // The first row of a trailing average is the raw value itself.
    const auto second_line = [](const std::string& s) {
        const auto a = s.find('\n') + 1;
        return s.substr(a, s.find('\n', a) - a);
    };
    EXPECT_EQ(second_line(raw), second_line(smooth));
    EXPECT_NE(raw, smooth);

    io::emit_figure_data(runs_, io::Figure::LatencyVsLoad, dir.path() / "lat.csv");
    const std::string lat = slurp(dir.path() / "lat.csv");
    EXPECT_EQ(lat.substr(0, lat.find('\n')), "load_mbps,independent,vdn,pvdn");
    EXPECT_EQ(count_lines(lat), 4u);
    EXPECT_FALSE(fs::exists(dir.path() / "lat_ma20.csv"));
}

TEST(MovingAverage, Trailing) {
    const auto m = io::moving_average({1, 2, 3, 4, 5}, 2);
    EXPECT_EQ(m, (std::vector<double>{1, 1.5, 2.5, 3.5, 4.5}));
    EXPECT_EQ(io::moving_average({4, 8}, 20), (std::vector<double>{4, 6}));
}

TEST(ResultsDir, ReadsEveryMetricsFile) {
    TempDir dir;
    const auto base = small(Algorithm::Pvdn, 0, 2.0, 8);
    spit(dir.path() / io::kConfigFileName, io::serialize_config(base));
    for (Algorithm a : kAllAlgorithms) {
        auto c = base;
        c.algorithm = a;
        io::write_metrics(run_experiment(c), dir.path() / io::metrics_file_name(c));
    }
    spit(dir.path() / "notes.csv", "unrelated,file\n");
    const auto runs = io::read_results_dir(dir.path());
    ASSERT_EQ(runs.size(), 3u);
    for (const auto& r : runs) {
        auto want = base;
        want.algorithm = r.config.algorithm;
        EXPECT_EQ(r.config, want);
    }
    EXPECT_THROW(io::read_results_dir(dir.path() / "nope"), io::Error);
}
