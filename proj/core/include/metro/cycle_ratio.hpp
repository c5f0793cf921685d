#pragma once

/**
 * @file cycle_ratio.hpp
 * @brief Maximum cycle ratio (max-plus growth rate) of a timed event graph.
 *
 * For a strongly connected event graph the dynamics
 *   d^k[j] = max over edges (i -> j) of d^{k - shift}[i] + weight
 * grow asymptotically at rate  max over cycles C of  W(C) / T(C),
 * where W sums edge weights and T sums shifts.
 *
 * Three independent routes are provided:
 *   - howard_cycle_ratio: policy iteration, returns the critical cycle so the
 *     ratio is an exact (weight sum, shift sum) pair;
 *   - karp_cycle_ratio: Karp's maximum cycle mean on the reduced one-step
 *     matrix A0* (x) A1 (shifts > 1 are split first);
 *   - enumerate_cycle_ratios: brute force over simple cycles, for small graphs.
 */

#include <cstddef>
#include <vector>

#include "metro/event_graph.hpp"
#include "metro/tropical.hpp"

namespace metro {

enum class RatioMethod { Howard, Karp };

struct CycleRatio {
    double value = 0.0;
    /// Numerator / denominator of the critical cycle. Only meaningful when
    /// exact is true (Howard found the cycle); the Karp route yields value only.
    double weight = 0.0;
    unsigned long shift = 0;
    bool exact = false;
    std::vector<std::size_t> cycle;  // node sequence of the critical cycle
    RatioMethod method = RatioMethod::Howard;
};

struct HowardOptions {
    std::size_t max_iterations = 10000;
    /// Relative threshold for accepting a policy improvement.
    double tolerance = 1e-12;
};

struct HowardResult {
    bool converged = false;
    std::size_t iterations = 0;
    CycleRatio ratio;
    /// Per-node bias: bias[u] = max over out-edges (u -> v) of w - ratio*shift + bias[v].
    std::vector<double> bias;
};

HowardResult howard_cycle_ratio(const EventGraph& g, const HowardOptions& opts = {});

/// Karp on the reduced matrix. Throws GraphError if the graph has no cycle.
double karp_cycle_ratio(const EventGraph& g);

/// One-step matrix M with d^k = M (x) d^{k-1}. Requires every shift in {0, 1}.
TropicalMatrix one_step_matrix(const EventGraph& g);

/**
 * Asymptotic growth rate. Requires a strongly connected graph; throws
 * GraphError otherwise. Uses Howard's policy iteration and falls back to Karp
 * if it does not converge within opts.max_iterations.
 */
CycleRatio growth_rate(const EventGraph& g, const HowardOptions& opts = {});

/**
 * Ratio of every simple cycle with at most max_len edges (parallel edges give
 * distinct cycles). Throws GraphError if node_count > max_nodes or if no
 * cycle exists.
 */
std::vector<double> enumerate_cycle_ratios(const EventGraph& g, std::size_t max_len,
                                           std::size_t max_nodes = 12);

/**
 * Max-plus eigenvector v: v[j] = max over (i -> j) of v[i] + w - rate*shift,
 * normalised so min v = 0. Seeding d^0 = v yields d^k = v + k*rate.
 * Requires a strongly connected graph.
 */
std::vector<double> eigenvector(const EventGraph& g);

}  // namespace metro
