#ifndef SLICEMARL_MDP_REWARD_HPP
#define SLICEMARL_MDP_REWARD_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "slicemarl/env/environment.hpp"

namespace slicemarl {

/// Ceiling of the per-UE average eMBB throughput used to normalise eMBB
/// rewards: every RBG at the rate of the best-placed eMBB UE (no fading),
/// shared over the slice's UEs.
inline double max_embb_throughput(const Environment& env) {
    double best_gain = 0;
    for (const auto& ue : env.ues())
        if (ue.slice == Slice::Embb) best_gain = std::max(best_gain, mean_channel_gain(ue.distance_m));
    const auto& cfg = env.config();
    return cfg.num_rbgs * rbg_rate(best_gain, cfg) / cfg.num_embb_ue;
}

inline double reward_msma(double embb_throughput_bps, double b_max) {
    if (!(b_max > 0)) throw std::invalid_argument("b_max must be > 0");
    return std::clamp(embb_throughput_bps / b_max, 0.0, 1.0);
}

inline double reward_usma(double urllc_delay_s, double d_tar_s) {
    if (!(d_tar_s > 0)) throw std::invalid_argument("d_tar_s must be > 0");
    return std::clamp((d_tar_s - urllc_delay_s) / d_tar_s, -1.0, 1.0);
}

/// Trade-off factor |dD| / (|dD| + |dB|) on already normalised deltas;
/// 0.5 when both are zero.
inline double adaptive_beta(double delta_d_hat, double delta_b_hat) {
    const double d = std::abs(delta_d_hat), b = std::abs(delta_b_hat);
    if (d + b == 0) return 0.5;
    if (std::isinf(d) && std::isinf(b)) return 0.5;
    if (std::isinf(d)) return 1.0;
    if (std::isinf(b)) return 0.0;
    return std::clamp(d / (d + b), 0.0, 1.0);
}

/// Normalises raw deltas (seconds, bits/s) by d_tar and b_max first.
inline double adaptive_beta(double delta_d_s, double delta_b_bps, double d_tar_s, double b_max) {
    return adaptive_beta(delta_d_s / d_tar_s, delta_b_bps / b_max);
}

struct RewardBundle {
    double r_usma = 0;
    double r_msma = 0;
    double delta_b = 0;      // bits/s of eMBB throughput lost
    double delta_d = 0;      // seconds of URLLC latency gained
    double delta_b_hat = 0;  // delta_b / b_max
    double delta_d_hat = 0;  // delta_d / d_tar
    double beta = 0.5;
    double omega_usma = 1;
    double omega_msma = 1;
    // Per-agent terms of the shaped reward; shaped = shaped_usma + shaped_msma.
    double shaped_usma = 0;
    double shaped_msma = 0;
    double shaped = 0;
    double joint = 0;
};

struct ShapingInputs {
    double r_usma = 0;
    double r_msma = 0;
    double delta_b_hat = 0;
    double delta_d_hat = 0;
    double beta = 0.5;
    double omega_usma = 1;
    double omega_msma = 1;
};

/// Cooperative reward: each agent's own reward minus a share of the other
/// slice's KPI change, split by beta.
inline RewardBundle shaped_reward(const ShapingInputs& in) {
    RewardBundle r;
    r.r_usma = in.r_usma;
    r.r_msma = in.r_msma;
    r.delta_b_hat = in.delta_b_hat;
    r.delta_d_hat = in.delta_d_hat;
    r.beta = in.beta;
    r.omega_usma = in.omega_usma;
    r.omega_msma = in.omega_msma;
    r.shaped_usma = in.omega_usma * (in.r_usma - in.beta * in.delta_b_hat);
    r.shaped_msma = in.omega_msma * (in.r_msma - (1.0 - in.beta) * in.delta_d_hat);
    r.shaped = r.shaped_usma + r.shaped_msma;
    r.joint = in.r_usma + in.r_msma;
    return r;
}

/// Slice KPIs aggregated over one decision interval.
struct IntervalKpi {
    double embb_throughput_bps = 0;
    double urllc_delay_s = 0;
};

/// Rewards for one decision step. `prev` is the previous step's KPIs (deltas
/// are zero on the first step of an episode when it is empty).
inline RewardBundle compute_rewards(const IntervalKpi& now, const IntervalKpi* prev, double d_tar_s,
                                    double b_max, double omega_usma = 1, double omega_msma = 1) {
    ShapingInputs in;
    in.r_usma = reward_usma(now.urllc_delay_s, d_tar_s);
    in.r_msma = reward_msma(now.embb_throughput_bps, b_max);
    // Both deltas measure degradation: throughput lost, latency gained.
    double db = 0, dd = 0;
    if (prev) {
        db = prev->embb_throughput_bps - now.embb_throughput_bps;
        dd = now.urllc_delay_s - prev->urllc_delay_s;
    }
    in.delta_b_hat = db / b_max;
    in.delta_d_hat = dd / d_tar_s;
    in.beta = adaptive_beta(in.delta_d_hat, in.delta_b_hat);
    in.omega_usma = omega_usma;
    in.omega_msma = omega_msma;
    RewardBundle r = shaped_reward(in);
    r.delta_b = db;
    r.delta_d = dd;
    return r;
}

/// Every (a_usma, a_msma) with a_usma + a_msma <= num_rbgs, in
/// lexicographic order.
inline std::vector<std::pair<int, int>> feasible_joint_actions(int num_rbgs) {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<std::size_t>((num_rbgs + 1) * (num_rbgs + 2) / 2));
    for (int a = 0; a <= num_rbgs; ++a)
        for (int b = 0; a + b <= num_rbgs; ++b) out.emplace_back(a, b);
    return out;
}

inline bool is_feasible(int a_usma, int a_msma, int num_rbgs) {
    return a_usma >= 0 && a_msma >= 0 && a_usma + a_msma <= num_rbgs;
}

} // namespace slicemarl

#endif // SLICEMARL_MDP_REWARD_HPP
