#ifndef SLICEMARL_RNG_HPP
#define SLICEMARL_RNG_HPP

#include <cstdint>
#include <random>

namespace slicemarl {

using Rng = std::mt19937_64;

/// Independent sub-streams of one experiment seed. Traffic draws live on
/// their own stream so two learners run with the same seed see the same
/// arrival process whatever they allocate.
enum class Stream : std::uint64_t {
    Placement = 1,
    Traffic = 2,
    Channel = 3,
    Harq = 4,
    Agent = 5,
};

inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t episode = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(episode),
                      static_cast<std::uint32_t>(episode >> 32)};
    return Rng(seq);
}

/// Random streams consumed by one environment step.
struct EnvStreams {
    Rng traffic;
    Rng channel;
    Rng harq;

    static EnvStreams for_episode(std::uint64_t seed, std::uint64_t episode) {
        return {make_rng(seed, Stream::Traffic, episode), make_rng(seed, Stream::Channel, episode),
                make_rng(seed, Stream::Harq, episode)};
    }
};

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

} // namespace slicemarl

#endif // SLICEMARL_RNG_HPP
