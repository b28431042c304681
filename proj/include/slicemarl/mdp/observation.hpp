#ifndef SLICEMARL_MDP_OBSERVATION_HPP
#define SLICEMARL_MDP_OBSERVATION_HPP

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "slicemarl/env/environment.hpp"

namespace slicemarl {

enum class Agent { Usma, Msma };

inline Slice slice_of(Agent a) { return a == Agent::Usma ? Slice::Urllc : Slice::Embb; }

struct Observation {
    int queue_bin = 0;
    int own_last_action = 0;
    int peer_last_action = 0;

    bool operator==(const Observation&) const = default;
};

/// Action of one agent: the number of RBGs requested for its slice.
struct Action {
    int rbg_request = 0;

    bool operator==(const Action&) const = default;
};

struct LastActions {
    int usma = 0;
    int msma = 0;
};

/// Discretisation of the agent's view and the dense index used by Q-tables.
class ObservationSpace {
public:
    /// `bin_upper` holds inclusive upper edges; the last bin is open-ended.
    /// The default edges give bins {0}, {1-2}, {3-5}, {6-10}, {>10}.
    explicit ObservationSpace(int num_rbgs, std::vector<int> bin_upper = {0, 2, 5, 10})
        : num_actions_(num_rbgs + 1), bin_upper_(std::move(bin_upper)) {
        if (num_rbgs < 1) throw std::invalid_argument("num_rbgs must be >= 1");
        if (bin_upper_.empty() || !std::is_sorted(bin_upper_.begin(), bin_upper_.end()) ||
            std::adjacent_find(bin_upper_.begin(), bin_upper_.end()) != bin_upper_.end() ||
            bin_upper_.front() < 0)
            throw std::invalid_argument("bin edges must be strictly increasing and >= 0");
    }

    int num_bins() const { return static_cast<int>(bin_upper_.size()) + 1; }
    int num_actions() const { return num_actions_; }
    int num_states() const { return num_bins() * num_actions_ * num_actions_; }

    int queue_bin(int queued_packets) const {
        const auto it = std::lower_bound(bin_upper_.begin(), bin_upper_.end(), queued_packets);
        return static_cast<int>(it - bin_upper_.begin());
    }

    int encode(const Observation& o) const {
        if (o.queue_bin < 0 || o.queue_bin >= num_bins() || o.own_last_action < 0 ||
            o.own_last_action >= num_actions_ || o.peer_last_action < 0 ||
            o.peer_last_action >= num_actions_)
            throw std::out_of_range("observation field out of range");
        return (o.queue_bin * num_actions_ + o.own_last_action) * num_actions_ + o.peer_last_action;
    }

    Observation decode(int index) const {
        if (index < 0 || index >= num_states()) throw std::out_of_range("state index out of range");
        Observation o;
        o.peer_last_action = index % num_actions_;
        index /= num_actions_;
        o.own_last_action = index % num_actions_;
        o.queue_bin = index / num_actions_;
        return o;
    }

private:
    int num_actions_;
    std::vector<int> bin_upper_;
};

/// Builds an agent's observation from the environment's queues and the last
/// actions. PVDN passes USMA's current pick as MSMA's peer action.
inline Observation encode_observation(const Environment& env, const ObservationSpace& space,
                                      Agent agent, const LastActions& last) {
    Observation o;
    o.queue_bin = space.queue_bin(env.queued(slice_of(agent)));
    o.own_last_action = agent == Agent::Usma ? last.usma : last.msma;
    o.peer_last_action = agent == Agent::Usma ? last.msma : last.usma;
    return o;
}

} // namespace slicemarl

#endif // SLICEMARL_MDP_OBSERVATION_HPP
