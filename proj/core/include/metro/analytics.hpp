#pragma once

/**
 * @file analytics.hpp
 * @brief Closed-form asymptotic headway and frequency, traffic phases, sweeps.
 *
 * With t_j = r_nom_j + X_j g_min_j the asymptotic headway of the linear
 * dynamics is the largest of
 *   free flow       sum_j t_j / m
 *   max frequency   max_j (t_j + s_min_j)
 *   congested       sum_j s_min_j / (n - m)
 * and the frequency is its reciprocal.
 */

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metro/line_model.hpp"

namespace metro {

/// Listed in tie-break priority order.
enum class Phase { FreeFlow = 0, MaxFrequency = 1, Congested = 2 };

std::string_view to_string(Phase phase);

struct PhaseResult {
    double headway = 0.0;    ///< seconds
    double frequency = 0.0;  ///< trains per second, 1 / headway
    Phase phase = Phase::FreeFlow;
    std::array<double, 3> terms{};  ///< free-flow, max-frequency, congested headway terms
};

/// Argmax of the three terms; ties go to the earlier phase.
Phase classify_phase(const std::array<double, 3>& terms);

/// Throws ModelError unless 0 < m < n and dp matches cfg.
PhaseResult headway_formula(const LineConfig& cfg, const DerivedParams& dp);

struct FrequencyResult {
    double frequency = 0.0;
    Phase phase = Phase::FreeFlow;
    /// m / sum t, 1 / max(t + s), (n - m) / sum s; frequency is their minimum.
    std::array<double, 3> terms{};
};

/// Frequency evaluated directly in reciprocal form.
FrequencyResult frequency_formula(const LineConfig& cfg, const DerivedParams& dp);

/// Mean x_j and X_j over platform segments (all segments if none is a platform).
struct DemandLevel {
    double x_mean = 0.0;
    double X_mean = 0.0;
};
DemandLevel demand_level(const LineConfig& cfg, const DerivedParams& dp);

struct SweepCell {
    std::size_t trains = 0;
    double demand_scale = 0.0;
    bool valid = false;
    std::string error;  ///< set when !valid
    DemandLevel demand;
    PhaseResult result;
};

struct SweepGrid {
    std::vector<std::size_t> m_values;
    std::vector<double> demand_scales;
    /// Row-major: cells[i * demand_scales.size() + k] is (m_values[i], demand_scales[k]).
    std::vector<SweepCell> cells;

    const SweepCell& cell(std::size_t i, std::size_t k) const { return cells[i * demand_scales.size() + k]; }
};

/**
 * Evaluates the headway formula at every (m, scale). Each cell uses an even
 * occupancy for m and multiplies every lambda by scale. Invalid cells are
 * marked and the sweep continues. Rows are evaluated concurrently.
 */
SweepGrid sweep(const LineConfig& cfg, std::span<const std::size_t> m_values, std::span<const double> demand_scales);

/// Smallest m in 1..n-1 minimising the formula headway. Requires n >= 3.
std::size_t optimal_train_count(const LineConfig& cfg);

}  // namespace metro
