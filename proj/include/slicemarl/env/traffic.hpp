#ifndef SLICEMARL_ENV_TRAFFIC_HPP
#define SLICEMARL_ENV_TRAFFIC_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "slicemarl/env/config.hpp"
#include "slicemarl/rng.hpp"

namespace slicemarl {

struct Packet {
    std::int64_t arrival_tti = 0;
    double size_bits = 0;
    int retx_count = 0;
    double compute_cycles = 0;
    // Bits still to send in the current attempt.
    double remaining_bits = 0;
    // First TTI the packet may be scheduled (later than arrival while a HARQ
    // round trip is pending).
    std::int64_t ready_tti = 0;
};

/// Mean Poisson arrivals per UE per TTI for a slice.
inline double arrivals_per_ue_per_tti(const NetworkConfig& cfg, Slice s) {
    const double packets_per_s = cfg.load_mbps(s) * 1e6 / cfg.packet_bits(s);
    return packets_per_s * cfg.tti_s / cfg.ue_count(s);
}

/// Per-UE arrival counts for one TTI: URLLC UEs first, then eMBB UEs.
inline std::vector<int> sample_arrivals(Rng& rng, const NetworkConfig& cfg) {
    std::vector<int> counts;
    counts.reserve(static_cast<std::size_t>(cfg.num_urllc_ue + cfg.num_embb_ue));
    for (Slice s : {Slice::Urllc, Slice::Embb}) {
        const double mean = arrivals_per_ue_per_tti(cfg, s);
        for (int u = 0; u < cfg.ue_count(s); ++u) {
            if (mean <= 0) {
                counts.push_back(0);
                continue;
            }
            counts.push_back(std::poisson_distribution<int>(mean)(rng));
        }
    }
    return counts;
}

inline Packet make_packet(const NetworkConfig& cfg, Slice s, std::int64_t tti) {
    Packet p;
    p.arrival_tti = tti;
    p.size_bits = cfg.packet_bits(s);
    p.remaining_bits = p.size_bits;
    p.ready_tti = tti;
    p.compute_cycles = cfg.edge_delay_enabled ? cfg.compute_cycles_per_packet : 0.0;
    return p;
}

} // namespace slicemarl

#endif // SLICEMARL_ENV_TRAFFIC_HPP
