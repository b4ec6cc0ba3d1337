#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "mq/core_maps.hpp"
#include "mq/distribution.hpp"

namespace mq {

struct TrajectoryConfig {
    std::uint64_t n_steps = 1000000;
    std::uint64_t burn_in = 1000;
    std::uint64_t seed = 1;
    BlochState initial_state = BlochState::on_gc(0.0);
    std::size_t bins = 1000;
    std::uint64_t deviation_stride = 0;  // record |dphi| every this many steps; 0 disables
};

struct TrajectoryResult {
    DiscretizedDistribution histogram;
    BlochState final_state;
    std::vector<double> gc_deviation_series;
    std::uint64_t clicks = 0;
    std::uint64_t no_clicks = 0;
};

// Uniform double in [0, 1) from the top 53 bits of a 64-bit Mersenne Twister draw.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

TrajectoryResult simulate(const TrajectoryConfig& cfg, const SetupParams& p);

struct EnsembleResult {
    DiscretizedDistribution histogram;  // average over trajectories
    std::vector<BlochState> final_states;
    std::uint64_t clicks = 0;
    std::uint64_t no_clicks = 0;
};

// Trajectory t uses seed cfg.seed ^ t; runs in parallel, merged in index order.
EnsembleResult simulate_ensemble(const TrajectoryConfig& cfg, const SetupParams& p, std::size_t trajectories);

double gc_deviation(const BlochState& s);

inline constexpr double kGcEigenvectorTolerance = 1e-10;

std::optional<std::size_t> gc_attraction_scan(const SetupParams& p, std::size_t k_max);

}  // namespace mq
