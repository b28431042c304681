#ifndef SLICEMARL_ENV_CONFIG_HPP
#define SLICEMARL_ENV_CONFIG_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace slicemarl {

/// Raised when a configuration value violates its accept rule. `key()` names
/// the offending field so callers can report it in machine-readable form.
class ConstraintError : public std::invalid_argument {
public:
    ConstraintError(std::string key, const std::string& what)
        : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

namespace detail {

inline void require(bool ok, const char* key, const char* rule) {
    if (!ok) throw ConstraintError(key, rule);
}

inline bool finite(double v) { return std::isfinite(v); }

} // namespace detail

enum class Slice { Urllc, Embb };

inline const char* to_string(Slice s) { return s == Slice::Urllc ? "urllc" : "embb"; }

/// Physical, traffic and protocol constants of the single-cell scenario.
struct NetworkConfig {
    double cell_radius_m = 125.0;
    double min_distance_m = 10.0;
    double bandwidth_hz = 20e6;
    int num_rbgs = 13;
    double tti_s = 1e-3;
    int num_urllc_ue = 10;
    int num_embb_ue = 5;
    double total_tx_power_dbm = 40.0;
    double noise_density_dbm_hz = -174.0;
    double bler = 0.1;
    int harq_rtt_ttis = 4;
    double urllc_packet_bits = 1600.0;
    double embb_packet_bits = 12000.0;
    double urllc_load_mbps = 2.0;
    double embb_load_mbps = 2.0;
    double d_tar_s = 5e-3;
    bool fading_enabled = true;
    // 0 means unbounded per-UE queues.
    int max_queue_packets = 0;
    bool edge_delay_enabled = false;
    double mec_capacity_cycles_s = 2e9;
    double compute_fraction = 0.5;
    double compute_cycles_per_packet = 1e6;

    double rbg_bandwidth_hz() const { return bandwidth_hz / num_rbgs; }

    double per_rbg_power_mw() const {
        return std::pow(10.0, total_tx_power_dbm / 10.0) / num_rbgs;
    }

    double noise_density_mw_hz() const { return std::pow(10.0, noise_density_dbm_hz / 10.0); }

    int ue_count(Slice s) const { return s == Slice::Urllc ? num_urllc_ue : num_embb_ue; }

    double packet_bits(Slice s) const {
        return s == Slice::Urllc ? urllc_packet_bits : embb_packet_bits;
    }

    double load_mbps(Slice s) const { return s == Slice::Urllc ? urllc_load_mbps : embb_load_mbps; }

    bool operator==(const NetworkConfig&) const = default;

    void validate() const {
        using detail::finite;
        using detail::require;
        require(finite(cell_radius_m) && cell_radius_m > 0, "cell_radius_m", "must be > 0");
        require(finite(min_distance_m) && min_distance_m > 0 && min_distance_m <= cell_radius_m,
                "min_distance_m", "must be in (0, cell_radius_m]");
        require(finite(bandwidth_hz) && bandwidth_hz > 0, "bandwidth_hz", "must be > 0");
        require(num_rbgs >= 1, "num_rbgs", "must be >= 1");
        require(finite(tti_s) && tti_s > 0, "tti_s", "must be > 0");
        require(num_urllc_ue >= 1, "num_urllc_ue", "must be >= 1");
        require(num_embb_ue >= 1, "num_embb_ue", "must be >= 1");
        require(finite(total_tx_power_dbm), "total_tx_power_dbm", "must be finite");
        require(finite(noise_density_dbm_hz), "noise_density_dbm_hz", "must be finite");
        require(finite(bler) && bler >= 0 && bler < 1, "bler", "must be in [0, 1)");
        require(harq_rtt_ttis >= 1, "harq_rtt_ttis", "must be >= 1");
        require(finite(urllc_packet_bits) && urllc_packet_bits > 0, "urllc_packet_bits",
                "must be > 0");
        require(finite(embb_packet_bits) && embb_packet_bits > 0, "embb_packet_bits",
                "must be > 0");
        require(finite(urllc_load_mbps) && urllc_load_mbps >= 0, "urllc_load_mbps",
                "must be >= 0");
        require(finite(embb_load_mbps) && embb_load_mbps >= 0, "embb_load_mbps", "must be >= 0");
        require(finite(d_tar_s) && d_tar_s > 0, "d_tar_s", "must be > 0");
        require(max_queue_packets >= 0, "max_queue_packets", "must be >= 0");
        require(finite(mec_capacity_cycles_s) && mec_capacity_cycles_s > 0,
                "mec_capacity_cycles_s", "must be > 0");
        require(finite(compute_fraction) && compute_fraction > 0 && compute_fraction <= 1,
                "compute_fraction", "must be in (0, 1]");
        require(finite(compute_cycles_per_packet) && compute_cycles_per_packet >= 0,
                "compute_cycles_per_packet", "must be >= 0");
    }
};

} // namespace slicemarl

#endif // SLICEMARL_ENV_CONFIG_HPP
