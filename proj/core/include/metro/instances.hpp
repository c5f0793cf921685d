#pragma once

/**
 * @file instances.hpp
 * @brief Deterministic random line instances for cross-checks and benchmarks.
 */

#include <cstddef>
#include <cstdint>
#include <random>

#include "metro/line_model.hpp"

namespace metro {

/// mt19937_64 with distribution mappings fixed here, so streams are
/// identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);
    /// Uniform integer in [lo, hi].
    std::size_t integer(std::size_t lo, std::size_t hi);
    bool chance(double p) { return uniform(0.0, 1.0) < p; }

private:
    std::mt19937_64 engine_;
};

struct InstanceOptions {
    std::size_t min_segments = 3;
    std::size_t max_segments = 30;
    double max_x = 0.4;
    double non_platform_probability = 0.2;
    /// Seed departures are the warm start minus U[0, seed_jitter) seconds per segment.
    double seed_jitter = 10.0;
    /// When enforcing linearity, every h_max exceeds 1.05 times the analytic
    /// headway plus this many seconds (room for the seed jitter and injected delays).
    double headway_allowance = 30.0;
    bool enforce_linearity = true;
};

/**
 * Random valid ring line with n in [min_segments, max_segments], m in
 * [1, n-1] trains at random positions and x_j in [0, max_x]. With
 * enforce_linearity, g_max and r_nom are chosen so that the
 * linearity conditions hold (demand is scaled down when sum x_j >= 0.8 m,
 * since no run-time margin can absorb it otherwise).
 */
LineConfig random_instance(Rng& rng, const InstanceOptions& opts = {});

}  // namespace metro
