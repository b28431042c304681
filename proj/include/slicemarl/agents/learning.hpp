#ifndef SLICEMARL_AGENTS_LEARNING_HPP
#define SLICEMARL_AGENTS_LEARNING_HPP

#include <cmath>
#include <deque>
#include <stdexcept>
#include <utility>
#include <vector>

#include "slicemarl/agents/q_table.hpp"
#include "slicemarl/env/config.hpp"
#include "slicemarl/rng.hpp"

namespace slicemarl {

inline void validate(const LearnerConfig& c) {
    detail::require(std::isfinite(c.alpha) && c.alpha > 0 && c.alpha <= 1, "alpha", "must be in (0, 1]");
    detail::require(std::isfinite(c.gamma) && c.gamma >= 0 && c.gamma < 1, "gamma", "must be in [0, 1)");
    detail::require(std::isfinite(c.epsilon) && c.epsilon >= 0 && c.epsilon <= 1, "epsilon",
                    "must be in [0, 1]");
    detail::require(c.n_step >= 1, "n_step", "must be >= 1");
    detail::require(std::isfinite(c.epsilon_min) && c.epsilon_min >= 0 && c.epsilon_min <= 1,
                    "epsilon_min", "must be in [0, 1]");
}

/// Moves Q(state, action) toward `target` with step size alpha.
inline void td_step(QTable& table, int state, int action, double target, double alpha) {
    if (!std::isfinite(target)) throw std::invalid_argument("non-finite TD target");
    const double q = table.value(state, action);
    table.set(state, action, q + alpha * (target - q));
    table.record_visit(state, action);
}

/// One-step Q-learning: Q(o,a) += alpha * (r + gamma * max_a' Q(o',a') - Q(o,a)).
/// `next_max_action` bounds a' when the next action range is restricted.
inline void q_update(QTable& table, int state, int action, double reward, int next_state,
                     const LearnerConfig& cfg, int next_max_action = -1) {
    if (!std::isfinite(reward)) throw std::invalid_argument("non-finite reward");
    const int last = next_max_action < 0 ? table.num_actions() - 1 : next_max_action;
    const double next_v = table.value(next_state, table.argmax(next_state, last));
    td_step(table, state, action, reward + cfg.gamma * next_v, cfg.alpha);
}

/// Forward-view n-step Q-learning for one table. Transitions are buffered
/// until n rewards are known; flush() bootstraps the tail at episode end.
class NStepLearner {
public:
    explicit NStepLearner(int n) : n_(n) {
        if (n < 1) throw std::invalid_argument("n_step must be >= 1");
    }

    void push(QTable& table, int state, int action, double reward, int next_state,
              const LearnerConfig& cfg, int next_max_action = -1) {
        if (!std::isfinite(reward)) throw std::invalid_argument("non-finite reward");
        pending_.push_back({state, action, reward});
        if (static_cast<int>(pending_.size()) == n_) apply_front(table, next_state, next_max_action, cfg);
    }

    void flush(QTable& table, int last_next_state, const LearnerConfig& cfg, int next_max_action = -1) {
        while (!pending_.empty()) apply_front(table, last_next_state, next_max_action, cfg);
    }

private:
    struct Step {
        int state;
        int action;
        double reward;
    };

    void apply_front(QTable& table, int bootstrap_state, int max_action, const LearnerConfig& cfg) {
        double g = 0, discount = 1;
        for (const auto& s : pending_) {
            g += discount * s.reward;
            discount *= cfg.gamma;
        }
        const int last = max_action < 0 ? table.num_actions() - 1 : max_action;
        g += discount * table.value(bootstrap_state, table.argmax(bootstrap_state, last));
        td_step(table, pending_.front().state, pending_.front().action, g, cfg.alpha);
        pending_.pop_front();
    }

    int n_;
    std::deque<Step> pending_;
};

/// Epsilon-greedy over [0, max_action]. Always draws the exploration coin
/// first so callers consume the stream identically whatever the outcome.
inline int epsilon_greedy(const QTable& table, int state, int max_action, double epsilon, Rng& rng) {
    if (uniform01(rng) < epsilon) return std::uniform_int_distribution<int>(0, max_action)(rng);
    return table.argmax(state, max_action);
}

inline int select_independent(const QTable& table, int state, Rng& rng, double epsilon) {
    return epsilon_greedy(table, state, table.num_actions() - 1, epsilon, rng);
}

/// Q_tot = Q_usma + Q_msma.
inline double vdn_joint_q(const QTable& usma, const QTable& msma, int s_usma, int a_usma, int s_msma,
                          int a_msma) {
    return usma.value(s_usma, a_usma) + msma.value(s_msma, a_msma);
}

/// Greedy pair over `feasible` under the additive joint value; ties go to
/// the lexicographically smallest pair.
inline std::pair<int, int> vdn_greedy(const QTable& usma, const QTable& msma, int s_usma, int s_msma,
                                      const std::vector<std::pair<int, int>>& feasible) {
    if (feasible.empty()) throw std::invalid_argument("empty feasible joint-action set");
    auto best = feasible.front();
    double best_v = vdn_joint_q(usma, msma, s_usma, best.first, s_msma, best.second);
    for (const auto& p : feasible) {
        const double v = vdn_joint_q(usma, msma, s_usma, p.first, s_msma, p.second);
        if (v > best_v || (v == best_v && p < best)) {
            best_v = v;
            best = p;
        }
    }
    return best;
}

/// VDN action selection: explores uniformly over feasible pairs with
/// probability epsilon, otherwise the additive greedy pair.
inline std::pair<int, int> select_vdn_joint(const QTable& usma, const QTable& msma, int s_usma,
                                            int s_msma, const std::vector<std::pair<int, int>>& feasible,
                                            Rng& rng, double epsilon) {
    if (feasible.empty()) throw std::invalid_argument("empty feasible joint-action set");
    if (uniform01(rng) < epsilon)
        return feasible[std::uniform_int_distribution<std::size_t>(0, feasible.size() - 1)(rng)];
    return vdn_greedy(usma, msma, s_usma, s_msma, feasible);
}

/// Joint TD update of an additive decomposition: one error on
/// Q_usma + Q_msma, bootstrapped from the best feasible next pair, applied
/// to both components.
inline void vdn_update(QTable& usma, QTable& msma, int s_usma, int a_usma, int s_msma, int a_msma,
                       double reward, int next_usma, int next_msma,
                       const std::vector<std::pair<int, int>>& feasible, const LearnerConfig& cfg) {
    if (!std::isfinite(reward)) throw std::invalid_argument("non-finite reward");
    const auto best = vdn_greedy(usma, msma, next_usma, next_msma, feasible);
    const double target = reward + cfg.gamma * vdn_joint_q(usma, msma, next_usma, best.first, next_msma, best.second);
    const double delta = target - vdn_joint_q(usma, msma, s_usma, a_usma, s_msma, a_msma);
    if (!std::isfinite(delta)) throw std::invalid_argument("non-finite TD error");
    usma.set(s_usma, a_usma, usma.value(s_usma, a_usma) + cfg.alpha * delta);
    msma.set(s_msma, a_msma, msma.value(s_msma, a_msma) + cfg.alpha * delta);
    usma.record_visit(s_usma, a_usma);
    msma.record_visit(s_msma, a_msma);
}

/// Joint TD update where the bootstrap value is that of the priority-ordered
/// greedy pair: USMA's argmax, then MSMA's argmax over the remainder in the
/// state conditioned on USMA's pick.
template <typename MsmaStateFn>
void pvdn_update(QTable& usma, QTable& msma, int s_usma, int a_usma, int s_msma, int a_msma, double reward,
                 int next_usma, MsmaStateFn&& next_msma_for, int num_rbgs, const LearnerConfig& cfg) {
    if (!std::isfinite(reward)) throw std::invalid_argument("non-finite reward");
    const int u = usma.argmax(next_usma, num_rbgs);
    const int sm = next_msma_for(u);
    const int m = msma.argmax(sm, num_rbgs - u);
    const double target = reward + cfg.gamma * (usma.value(next_usma, u) + msma.value(sm, m));
    const double delta = target - vdn_joint_q(usma, msma, s_usma, a_usma, s_msma, a_msma);
    usma.set(s_usma, a_usma, usma.value(s_usma, a_usma) + cfg.alpha * delta);
    msma.set(s_msma, a_msma, msma.value(s_msma, a_msma) + cfg.alpha * delta);
    usma.record_visit(s_usma, a_usma);
    msma.record_visit(s_msma, a_msma);
}

struct PvdnChoice {
    int usma = 0;
    int msma = 0;
    // MSMA's state index after conditioning on USMA's pick.
    int msma_state = 0;
};

/// Priority-ordered selection. USMA picks first over the full range, then
/// MSMA observes that pick (via `msma_state_for`) and picks within the RBGs
/// left over.
template <typename MsmaStateFn>
PvdnChoice select_pvdn(const QTable& usma, const QTable& msma, int s_usma, MsmaStateFn&& msma_state_for,
                       int num_rbgs, Rng& rng, double epsilon) {
    PvdnChoice c;
    c.usma = epsilon_greedy(usma, s_usma, num_rbgs, epsilon, rng);
    c.msma_state = msma_state_for(c.usma);
    c.msma = epsilon_greedy(msma, c.msma_state, num_rbgs - c.usma, epsilon, rng);
    return c;
}

} // namespace slicemarl

#endif // SLICEMARL_AGENTS_LEARNING_HPP
