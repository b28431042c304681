#ifndef SLICEMARL_HARNESS_EXPERIMENT_HPP
#define SLICEMARL_HARNESS_EXPERIMENT_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "slicemarl/agents/learning.hpp"
#include "slicemarl/env/environment.hpp"
#include "slicemarl/mdp/observation.hpp"
#include "slicemarl/mdp/reward.hpp"

namespace slicemarl {

enum class Algorithm { Independent, Vdn, Pvdn };

inline const char* to_string(Algorithm a) {
    switch (a) {
    case Algorithm::Independent: return "independent";
    case Algorithm::Vdn: return "vdn";
    case Algorithm::Pvdn: return "pvdn";
    }
    return "?";
}

inline std::optional<Algorithm> parse_algorithm(const std::string& s) {
    if (s == "independent") return Algorithm::Independent;
    if (s == "vdn") return Algorithm::Vdn;
    if (s == "pvdn") return Algorithm::Pvdn;
    return std::nullopt;
}

inline constexpr std::array<Algorithm, 3> kAllAlgorithms{Algorithm::Independent, Algorithm::Vdn,
                                                         Algorithm::Pvdn};

struct ExperimentConfig {
    NetworkConfig network;
    LearnerConfig learner;
    Algorithm algorithm = Algorithm::Pvdn;
    int episodes = 500;
    int ttis_per_episode = 2000;
    std::uint64_t seed = 0;
    int decision_interval_ttis = 10;

    bool operator==(const ExperimentConfig&) const = default;

    void validate() const {
        network.validate();
        slicemarl::validate(learner);
        detail::require(episodes >= 1, "episodes", "must be >= 1");
        detail::require(decision_interval_ttis >= 1, "decision_interval_ttis", "must be >= 1");
        detail::require(ttis_per_episode >= decision_interval_ttis, "ttis_per_episode",
                        "must be >= decision_interval_ttis");
    }
};

struct EpisodeMetrics {
    int episode = 0;
    double mean_reward = 0;
    double mean_urllc_delay_s = 0;
    double mean_embb_throughput_bps = 0;
    // Index 0 is USMA, 1 is MSMA; one bucket per RBG count.
    std::array<std::vector<std::int64_t>, 2> action_histogram;
};

struct WindowStats {
    double mean = 0;
    double stddev = 0;
};

struct ConvergedStats {
    WindowStats reward;
    WindowStats delay;
    WindowStats throughput;
};

struct RunResult {
    ExperimentConfig config;
    std::vector<EpisodeMetrics> per_episode;
    ConvergedStats converged_window_stats;
};

/// Both agents' tables plus the shared state encoding.
struct Learners {
    ObservationSpace space;
    QTable usma;
    QTable msma;

    explicit Learners(int num_rbgs)
        : space(num_rbgs), usma(space.num_states(), space.num_actions()),
          msma(space.num_states(), space.num_actions()) {}
};

/// Grants two uncoordinated requests. When they overrun the budget, the
/// slice served first (`usma_first`) gets its full request and the other
/// gets what remains.
inline std::pair<int, int> resolve_requests(int a_usma, int a_msma, int num_rbgs, bool usma_first) {
    if (a_usma + a_msma <= num_rbgs) return {a_usma, a_msma};
    if (usma_first) return {a_usma, num_rbgs - a_usma};
    return {num_rbgs - a_msma, a_msma};
}

namespace detail {

// Number of episodes in the trailing 10% window (at least one).
inline std::size_t window_size(std::size_t episodes) {
    return std::max<std::size_t>(1, episodes / 10);
}

template <typename Get>
WindowStats window_stats(const std::vector<EpisodeMetrics>& eps, std::size_t first, std::size_t count,
                         Get get) {
    WindowStats w;
    if (count == 0) return w;
    for (std::size_t i = first; i < first + count; ++i) w.mean += get(eps[i]);
    w.mean /= static_cast<double>(count);
    double ss = 0;
    for (std::size_t i = first; i < first + count; ++i) ss += (get(eps[i]) - w.mean) * (get(eps[i]) - w.mean);
    w.stddev = count > 1 ? std::sqrt(ss / static_cast<double>(count - 1)) : 0.0;
    return w;
}

} // namespace detail

inline ConvergedStats window_stats(const std::vector<EpisodeMetrics>& eps, bool final_window = true) {
    ConvergedStats s;
    const std::size_t n = detail::window_size(eps.size());
    if (eps.empty()) return s;
    const std::size_t first = final_window ? eps.size() - n : 0;
    s.reward = detail::window_stats(eps, first, n, [](const EpisodeMetrics& m) { return m.mean_reward; });
    s.delay = detail::window_stats(eps, first, n, [](const EpisodeMetrics& m) { return m.mean_urllc_delay_s; });
    s.throughput = detail::window_stats(eps, first, n,
                                        [](const EpisodeMetrics& m) { return m.mean_embb_throughput_bps; });
    return s;
}

/// Error raised while running an episode, tagged with its index.
class EpisodeError : public std::runtime_error {
public:
    EpisodeError(int episode, const std::string& what)
        : std::runtime_error("episode " + std::to_string(episode) + ": " + what), episode_(episode) {}
    int episode() const noexcept { return episode_; }

private:
    int episode_;
};

/// Runs one training episode. Queues are reset first; the learners' tables
/// carry over from earlier episodes. Every decision interval the agents
/// observe, pick an allocation that is held for the interval, and are
/// updated from the interval's KPIs once their next observation is known.
inline EpisodeMetrics run_episode(Environment& env, Learners& learners, const ExperimentConfig& cfg,
                                  int episode, EnvStreams& env_rng, Rng& agent_rng) {
    try {
        const NetworkConfig& net = env.config();
        const int n = net.num_rbgs;
        const double eps = cfg.learner.epsilon_at(episode, cfg.episodes);
        const double b_max = max_embb_throughput(env);
        const auto feasible = feasible_joint_actions(n);
        auto& space = learners.space;

        env.reset();

        EpisodeMetrics m;
        m.episode = episode;
        m.action_histogram[0].assign(static_cast<std::size_t>(n + 1), 0);
        m.action_histogram[1].assign(static_cast<std::size_t>(n + 1), 0);

        NStepLearner usma_learner(cfg.learner.n_step), msma_learner(cfg.learner.n_step);
        LastActions last;
        std::optional<IntervalKpi> prev_kpi;
        double last_delay = 0;

        struct Pending {
            int s_usma, a_usma, s_msma, a_msma;
            RewardBundle reward;
        };
        std::optional<Pending> pending;

        // Independent agents learn from their own slice reward. VDN and PVDN
        // share one TD error on the summed values; PVDN trains on the shaped
        // reward and bootstraps from the priority-ordered greedy pair.
        auto learn = [&](const Pending& p, int next_usma, int next_msma) {
            switch (cfg.algorithm) {
            case Algorithm::Independent:
                usma_learner.push(learners.usma, p.s_usma, p.a_usma, p.reward.r_usma, next_usma, cfg.learner);
                msma_learner.push(learners.msma, p.s_msma, p.a_msma, p.reward.r_msma, next_msma, cfg.learner);
                break;
            case Algorithm::Pvdn: {
                auto msma_state = [&](int usma_pick) {
                    return space.encode(encode_observation(env, space, Agent::Msma, {usma_pick, p.a_msma}));
                };
                pvdn_update(learners.usma, learners.msma, p.s_usma, p.a_usma, p.s_msma, p.a_msma, p.reward.shaped,
                            next_usma, msma_state, n, cfg.learner);
                break;
            }
            case Algorithm::Vdn:
                vdn_update(learners.usma, learners.msma, p.s_usma, p.a_usma, p.s_msma, p.a_msma, p.reward.joint,
                           next_usma, next_msma, feasible, cfg.learner);
                break;
            }
        };

        double reward_sum = 0;
        int decisions = 0;
        double delay_sum = 0, embb_tp_sum = 0;
        std::int64_t urllc_delivered = 0;
        int s_usma = 0, s_msma = 0;

        for (int t0 = 0; t0 < cfg.ttis_per_episode; t0 += cfg.decision_interval_ttis) {
            s_usma = space.encode(encode_observation(env, space, Agent::Usma, last));
            int a_usma = 0, a_msma = 0;
            switch (cfg.algorithm) {
            case Algorithm::Independent: {
                s_msma = space.encode(encode_observation(env, space, Agent::Msma, last));
                a_usma = select_independent(learners.usma, s_usma, agent_rng, eps);
                a_msma = select_independent(learners.msma, s_msma, agent_rng, eps);
                break;
            }
            case Algorithm::Vdn: {
                s_msma = space.encode(encode_observation(env, space, Agent::Msma, last));
                std::tie(a_usma, a_msma) =
                    select_vdn_joint(learners.usma, learners.msma, s_usma, s_msma, feasible, agent_rng, eps);
                break;
            }
            case Algorithm::Pvdn: {
                auto msma_state = [&](int usma_pick) {
                    return space.encode(encode_observation(env, space, Agent::Msma, {usma_pick, last.msma}));
                };
                const auto c = select_pvdn(learners.usma, learners.msma, s_usma, msma_state, n, agent_rng, eps);
                a_usma = c.usma;
                a_msma = c.msma;
                s_msma = c.msma_state;
                break;
            }
            }

            if (pending) learn(*pending, s_usma, s_msma);

            ++m.action_histogram[0][static_cast<std::size_t>(a_usma)];
            ++m.action_histogram[1][static_cast<std::size_t>(a_msma)];

            RbgAllocation alloc;
            if (cfg.algorithm == Algorithm::Independent) {
                const bool usma_first = uniform01(agent_rng) < 0.5;
                std::tie(alloc.urllc_rbgs, alloc.embb_rbgs) = resolve_requests(a_usma, a_msma, n, usma_first);
            } else {
                alloc.urllc_rbgs = a_usma;
                alloc.embb_rbgs = a_msma;
            }

            const int span = std::min(cfg.decision_interval_ttis, cfg.ttis_per_episode - t0);
            double i_delay_sum = 0, i_embb_tp = 0;
            int i_delivered = 0;
            for (int k = 0; k < span; ++k) {
                const KpiSample kpi = env.serve_tti(alloc, env_rng);
                i_delay_sum += kpi.urllc_delay_sum_s;
                i_delivered += kpi.urllc_delivered;
                i_embb_tp += kpi.embb_avg_throughput_bps;
            }
            delay_sum += i_delay_sum;
            urllc_delivered += i_delivered;
            embb_tp_sum += i_embb_tp;

            IntervalKpi now;
            now.embb_throughput_bps = i_embb_tp / span;
            // Nothing delivered: queued packets' age stands in for latency
            // while a backlog exists, otherwise the last value carries over.
            if (i_delivered > 0)
                last_delay = i_delay_sum / i_delivered;
            else if (env.queued(Slice::Urllc) > 0)
                last_delay = env.mean_queue_age_s(Slice::Urllc);
            now.urllc_delay_s = last_delay;

            const RewardBundle r = compute_rewards(now, prev_kpi ? &*prev_kpi : nullptr, net.d_tar_s, b_max);
            prev_kpi = now;
            reward_sum += r.joint;
            ++decisions;

            pending = Pending{s_usma, a_usma, s_msma, a_msma, r};
            last = {a_usma, a_msma};
        }

        // Bootstrap the final transition from the post-episode observation.
        const int end_usma = space.encode(encode_observation(env, space, Agent::Usma, last));
        const int end_msma = space.encode(encode_observation(env, space, Agent::Msma, last));
        if (pending) learn(*pending, end_usma, end_msma);
        usma_learner.flush(learners.usma, end_usma, cfg.learner);
        msma_learner.flush(learners.msma, end_msma, cfg.learner);

        m.mean_reward = decisions > 0 ? reward_sum / decisions : 0.0;
        m.mean_urllc_delay_s = urllc_delivered > 0 ? delay_sum / static_cast<double>(urllc_delivered) : 0.0;
        m.mean_embb_throughput_bps = embb_tp_sum / cfg.ttis_per_episode;
        return m;
    } catch (const EpisodeError&) {
        throw;
    } catch (const std::exception& e) {
        throw EpisodeError(episode, e.what());
    }
}

/// Trains one algorithm from scratch. UE placement is drawn once per run;
/// each episode gets its own traffic/channel/HARQ streams derived from the
/// seed, so runs with equal seeds share arrivals across algorithms.
inline RunResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    RunResult result;
    result.config = cfg;
    Rng placement = make_rng(cfg.seed, Stream::Placement);
    Environment env(cfg.network, placement);
    Learners learners(cfg.network.num_rbgs);
    Rng agent_rng = make_rng(cfg.seed, Stream::Agent);
    result.per_episode.reserve(static_cast<std::size_t>(cfg.episodes));
    for (int e = 0; e < cfg.episodes; ++e) {
        EnvStreams streams = EnvStreams::for_episode(cfg.seed, static_cast<std::uint64_t>(e));
        result.per_episode.push_back(run_episode(env, learners, cfg, e, streams, agent_rng));
    }
    result.converged_window_stats = window_stats(result.per_episode);
    return result;
}

} // namespace slicemarl

#endif // SLICEMARL_HARNESS_EXPERIMENT_HPP
