#ifndef SLICEMARL_ENV_ENVIRONMENT_HPP
#define SLICEMARL_ENV_ENVIRONMENT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "slicemarl/env/channel.hpp"
#include "slicemarl/env/config.hpp"
#include "slicemarl/env/traffic.hpp"
#include "slicemarl/rng.hpp"

namespace slicemarl {

struct UeState {
    int id = 0;
    Slice slice = Slice::Urllc;
    double distance_m = 0;
    // Sorted by arrival_tti; packets waiting on a HARQ round trip stay in
    // place with ready_tti in the future.
    std::deque<Packet> queue;
};

/// Per-slice RBG budgets plus the RBG -> UE map chosen by the scheduler.
/// URLLC owns RBG indices [0, urllc_rbgs), eMBB the next embb_rbgs.
struct RbgAllocation {
    int urllc_rbgs = 0;
    int embb_rbgs = 0;
    std::vector<std::pair<int, int>> ue_assignment; // (rbg, ue id)

    int rbgs(Slice s) const { return s == Slice::Urllc ? urllc_rbgs : embb_rbgs; }
};

struct KpiSample {
    std::int64_t tti = 0;
    // Shannon capacity of the RBGs serving eMBB UEs this TTI, averaged over
    // the slice's UEs.
    double embb_avg_throughput_bps = 0;
    // Delivered eMBB bits per second, averaged over the slice's UEs.
    double embb_goodput_bps = 0;
    double urllc_avg_delay_s = 0;
    int urllc_delivered = 0;
    int embb_delivered = 0;
    int urllc_queued = 0;
    int embb_queued = 0;
    int urllc_dropped = 0;
    int embb_dropped = 0;
    int urllc_arrived = 0;
    int embb_arrived = 0;
    // Raw sums so callers can aggregate several TTIs exactly.
    double urllc_delay_sum_s = 0;
    double embb_delivered_bits = 0;
    double urllc_delivered_bits = 0;
    // Transmission attempts (1 + retx_count) summed over delivered packets.
    int delivered_attempts = 0;
};

/// Cumulative packet accounting for one slice since the last reset.
struct SliceTotals {
    std::int64_t arrived = 0;
    std::int64_t delivered = 0;
    std::int64_t dropped = 0;
};

class InvalidAllocation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Single base station serving the URLLC and eMBB slices. One owner advances
/// it TTI by TTI; separate instances share nothing.
class Environment {
public:
    /// UEs are dropped uniformly over the cell annulus
    /// [min_distance_m, cell_radius_m] using `placement`.
    Environment(NetworkConfig cfg, Rng& placement) : cfg_(std::move(cfg)) {
        cfg_.validate();
        int id = 0;
        const double r0 = cfg_.min_distance_m, r1 = cfg_.cell_radius_m;
        for (Slice s : {Slice::Urllc, Slice::Embb}) {
            for (int i = 0; i < cfg_.ue_count(s); ++i) {
                const double u = uniform01(placement);
                ues_.push_back({id++, s, std::sqrt(u * (r1 * r1 - r0 * r0) + r0 * r0), {}});
            }
        }
    }

    /// Explicit placement; distances must lie in (0, cell_radius_m].
    Environment(NetworkConfig cfg, const std::vector<double>& urllc_distances,
                const std::vector<double>& embb_distances)
        : cfg_(std::move(cfg)) {
        cfg_.validate();
        if (urllc_distances.size() != static_cast<std::size_t>(cfg_.num_urllc_ue) ||
            embb_distances.size() != static_cast<std::size_t>(cfg_.num_embb_ue))
            throw std::invalid_argument("distance list size does not match UE count");
        int id = 0;
        for (Slice s : {Slice::Urllc, Slice::Embb}) {
            for (double d : s == Slice::Urllc ? urllc_distances : embb_distances) {
                if (!(d > 0 && d <= cfg_.cell_radius_m))
                    throw std::invalid_argument("UE distance must be in (0, cell_radius_m]");
                ues_.push_back({id++, s, d, {}});
            }
        }
    }

    const NetworkConfig& config() const { return cfg_; }
    const std::vector<UeState>& ues() const { return ues_; }
    std::int64_t now() const { return tti_; }
    const RbgAllocation& last_allocation() const { return last_alloc_; }
    const SliceTotals& totals(Slice s) const { return totals_[index(s)]; }

    /// Empties every queue and restarts the clock; UE positions persist.
    void reset() {
        for (auto& ue : ues_) ue.queue.clear();
        tti_ = 0;
        totals_[0] = totals_[1] = {};
        rr_next_[0] = rr_next_[1] = 0;
        last_alloc_ = {};
    }

    int queued(Slice s) const {
        int n = 0;
        for (const auto& ue : ues_)
            if (ue.slice == s) n += static_cast<int>(ue.queue.size());
        return n;
    }

    /// Mean time the slice's queued packets have waited so far, counting
    /// the current TTI as in delivered latencies; 0 with empty queues.
    double mean_queue_age_s(Slice s) const {
        double sum = 0;
        int n = 0;
        for (const auto& ue : ues_) {
            if (ue.slice != s) continue;
            for (const auto& p : ue.queue) {
                sum += static_cast<double>(tti_ - p.arrival_tti) * cfg_.tti_s;
                ++n;
            }
        }
        return n > 0 ? sum / n : 0.0;
    }

    /// Throws InvalidAllocation if `alloc` breaks the RBG budget or maps an
    /// RBG twice. A non-empty ue_assignment must also respect slice ranges.
    void check_allocation(const RbgAllocation& alloc) const {
        if (alloc.urllc_rbgs < 0 || alloc.embb_rbgs < 0)
            throw InvalidAllocation("negative RBG count");
        if (alloc.urllc_rbgs + alloc.embb_rbgs > cfg_.num_rbgs)
            throw InvalidAllocation("allocated RBGs exceed num_rbgs");
        std::vector<char> seen(static_cast<std::size_t>(cfg_.num_rbgs), 0);
        for (auto [rbg, ue] : alloc.ue_assignment) {
            if (rbg < 0 || rbg >= alloc.urllc_rbgs + alloc.embb_rbgs)
                throw InvalidAllocation("RBG index " + std::to_string(rbg) + " not allocated");
            if (seen[static_cast<std::size_t>(rbg)]++)
                throw InvalidAllocation("RBG " + std::to_string(rbg) + " assigned twice");
            if (ue < 0 || ue >= static_cast<int>(ues_.size()))
                throw InvalidAllocation("unknown UE " + std::to_string(ue));
            const Slice owner = rbg < alloc.urllc_rbgs ? Slice::Urllc : Slice::Embb;
            if (ues_[static_cast<std::size_t>(ue)].slice != owner)
                throw InvalidAllocation("RBG " + std::to_string(rbg) + " given to other slice");
        }
    }

    /// Advances one TTI: arrivals, scheduling, transmission, HARQ and KPI
    /// measurement. The allocation is validated before any state changes.
    KpiSample serve_tti(const RbgAllocation& alloc, EnvStreams& rng) {
        check_allocation(alloc);
        KpiSample k;
        k.tti = tti_;

        admit_arrivals(rng.traffic, k);

        last_alloc_ = alloc;
        if (alloc.ue_assignment.empty()) schedule_round_robin(last_alloc_);

        std::vector<double> capacity_bits(ues_.size(), 0.0);
        double embb_rate_bps = 0;
        for (auto [rbg, ue] : last_alloc_.ue_assignment) {
            const auto& target = ues_[static_cast<std::size_t>(ue)];
            const double rate = rbg_rate(channel_gain(target.distance_m, cfg_, rng.channel), cfg_);
            capacity_bits[static_cast<std::size_t>(ue)] += rate * cfg_.tti_s;
            if (target.slice == Slice::Embb) embb_rate_bps += rate;
        }
        for (std::size_t i = 0; i < ues_.size(); ++i)
            if (capacity_bits[i] > 0) transmit(ues_[i], capacity_bits[i], rng.harq, k);

        k.urllc_queued = queued(Slice::Urllc);
        k.embb_queued = queued(Slice::Embb);
        k.embb_avg_throughput_bps = embb_rate_bps / cfg_.num_embb_ue;
        k.embb_goodput_bps = k.embb_delivered_bits / cfg_.tti_s / cfg_.num_embb_ue;
        k.urllc_avg_delay_s = k.urllc_delivered > 0 ? k.urllc_delay_sum_s / k.urllc_delivered : 0.0;
        ++tti_;
        return k;
    }

private:
    static std::size_t index(Slice s) { return s == Slice::Urllc ? 0 : 1; }

    void admit_arrivals(Rng& rng, KpiSample& k) {
        const auto counts = sample_arrivals(rng, cfg_);
        for (std::size_t i = 0; i < ues_.size(); ++i) {
            auto& ue = ues_[i];
            auto& tot = totals_[index(ue.slice)];
            for (int n = 0; n < counts[i]; ++n) {
                ++tot.arrived;
                (ue.slice == Slice::Urllc ? k.urllc_arrived : k.embb_arrived)++;
                if (cfg_.max_queue_packets > 0 &&
                    static_cast<int>(ue.queue.size()) >= cfg_.max_queue_packets) {
                    ++tot.dropped;
                    (ue.slice == Slice::Urllc ? k.urllc_dropped : k.embb_dropped)++;
                    continue;
                }
                ue.queue.push_back(make_packet(cfg_, ue.slice, tti_));
            }
        }
    }

    bool has_ready_packet(const UeState& ue) const {
        return std::any_of(ue.queue.begin(), ue.queue.end(),
                           [&](const Packet& p) { return p.ready_tti <= tti_; });
    }

    // Each slice's RBGs cycle over its UEs holding a schedulable packet,
    // resuming where the previous TTI stopped.
    void schedule_round_robin(RbgAllocation& alloc) {
        int rbg = 0;
        for (Slice s : {Slice::Urllc, Slice::Embb}) {
            std::vector<int> ready;
            for (const auto& ue : ues_)
                if (ue.slice == s && has_ready_packet(ue)) ready.push_back(ue.id);
            // Every allocated RBG is mapped to some UE of its slice; with no
            // backlog the cycle runs over all of them.
            if (ready.empty())
                for (const auto& ue : ues_)
                    if (ue.slice == s) ready.push_back(ue.id);
            const int budget = alloc.rbgs(s);
            // Rotate so the UE after the last one served goes first.
            auto& next = rr_next_[index(s)];
            const auto start = std::find_if(ready.begin(), ready.end(), [&](int id) { return id >= next; });
            std::rotate(ready.begin(), start, ready.end());
            for (int j = 0; j < budget; ++j)
                alloc.ue_assignment.emplace_back(rbg++, ready[static_cast<std::size_t>(j) % ready.size()]);
            if (budget > 0)
                next = ready[static_cast<std::size_t>(budget - 1) % ready.size()] + 1;
        }
    }

    void transmit(UeState& ue, double capacity_bits, Rng& harq, KpiSample& k) {
        auto it = ue.queue.begin();
        while (capacity_bits > 0 && it != ue.queue.end()) {
            if (it->ready_tti > tti_) {
                ++it;
                continue;
            }
            const double sent = std::min(capacity_bits, it->remaining_bits);
            capacity_bits -= sent;
            it->remaining_bits -= sent;
            if (it->remaining_bits > 0) break;

            if (cfg_.bler > 0 && uniform01(harq) < cfg_.bler) {
                ++it->retx_count;
                it->remaining_bits = it->size_bits;
                it->ready_tti = tti_ + cfg_.harq_rtt_ttis;
                ++it;
                continue;
            }
            deliver(ue, *it, k);
            it = ue.queue.erase(it);
        }
    }

    void deliver(const UeState& ue, const Packet& p, KpiSample& k) {
        // A packet served in its arrival TTI counts one full TTI.
        double latency = static_cast<double>(tti_ - p.arrival_tti + 1) * cfg_.tti_s;
        if (cfg_.edge_delay_enabled)
            latency += edge_delay(p.compute_cycles, cfg_.compute_fraction, cfg_.mec_capacity_cycles_s);
        ++totals_[index(ue.slice)].delivered;
        k.delivered_attempts += p.retx_count + 1;
        if (ue.slice == Slice::Urllc) {
            ++k.urllc_delivered;
            k.urllc_delay_sum_s += latency;
            k.urllc_delivered_bits += p.size_bits;
        } else {
            ++k.embb_delivered;
            k.embb_delivered_bits += p.size_bits;
        }
    }

    NetworkConfig cfg_;
    std::vector<UeState> ues_;
    std::int64_t tti_ = 0;
    SliceTotals totals_[2]{};
    int rr_next_[2]{};
    RbgAllocation last_alloc_;
};

} // namespace slicemarl

#endif // SLICEMARL_ENV_ENVIRONMENT_HPP
