#ifndef SLICEMARL_ENV_CHANNEL_HPP
#define SLICEMARL_ENV_CHANNEL_HPP

#include <cmath>
#include <random>
#include <stdexcept>

#include "slicemarl/env/config.hpp"
#include "slicemarl/rng.hpp"

namespace slicemarl {

/// Log-distance macro-cell path loss in dB, distance in metres.
inline double path_loss_db(double distance_m) {
    if (!(distance_m > 0)) throw std::invalid_argument("path loss undefined for distance <= 0");
    return 128.1 + 37.6 * std::log10(distance_m / 1000.0);
}

/// Linear gain without fading.
inline double mean_channel_gain(double distance_m) {
    return std::pow(10.0, -path_loss_db(distance_m) / 10.0);
}

/// Linear power gain for one UE on one RBG. Fading is unit-mean exponential
/// (Rayleigh power) drawn independently per call when enabled.
inline double channel_gain(double distance_m, const NetworkConfig& cfg, Rng& rng) {
    const double g = mean_channel_gain(distance_m);
    if (!cfg.fading_enabled) return g;
    return g * std::exponential_distribution<double>(1.0)(rng);
}

/// Shannon rate of one RBG in bits/s. Interference from other cells enters
/// the denominator; the single-cell scenario always passes zero.
inline double rbg_rate(double gain, const NetworkConfig& cfg, double interference_mw = 0.0) {
    if (!(gain >= 0)) throw std::invalid_argument("channel gain must be >= 0");
    const double b = cfg.rbg_bandwidth_hz();
    const double sinr = cfg.per_rbg_power_mw() * gain / (b * cfg.noise_density_mw_hz() + interference_mw);
    return b * std::log2(1.0 + sinr);
}

/// MEC processing delay of a task: cycles / (fraction * capacity).
inline double edge_delay(double compute_cycles, double compute_fraction, double mec_capacity) {
    if (!(compute_fraction > 0 && compute_fraction <= 1))
        throw std::invalid_argument("compute_fraction must be in (0, 1]");
    if (!(mec_capacity > 0)) throw std::invalid_argument("mec_capacity must be > 0");
    if (!(compute_cycles >= 0)) throw std::invalid_argument("compute_cycles must be >= 0");
    return compute_cycles / (compute_fraction * mec_capacity);
}

} // namespace slicemarl

#endif // SLICEMARL_ENV_CHANNEL_HPP
