#pragma once

/**
 * @file verify.hpp
 * @brief Three-way agreement check on random instances.
 *
 * For every trial the asymptotic headway is obtained three ways:
 *   - the closed-form formula,
 *   - the growth rate of the event graph (policy iteration),
 *   - a linear simulation of 200 n events from a jittered seed.
 * A trial agrees when all pairwise relative differences are within rel_tol.
 */

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include "metro/analytics.hpp"
#include "metro/instances.hpp"
#include "metro/line_model.hpp"

namespace metro {

using HeadwayFormula = std::function<PhaseResult(const LineConfig&, const DerivedParams&)>;

struct VerifyOptions {
    std::size_t trials = 50;
    std::uint64_t seed = 7;
    double rel_tol = 1e-9;
    std::size_t events_per_segment = 200;
    InstanceOptions instances;
    /// Formula under test; empty means headway_formula. Lets tests inject a faulty formula.
    HeadwayFormula formula;
};

struct VerifyTrial {
    std::size_t index = 0;
    LineConfig cfg;
    double formula = 0.0;
    double graph = 0.0;
    double simulated = 0.0;
    bool simulation_converged = false;
    double max_rel_error = 0.0;
    bool agree = false;
};

struct VerifyReport {
    std::vector<VerifyTrial> trials;
    std::size_t agreed = 0;

    bool all_agree() const { return agreed == trials.size(); }
};

VerifyTrial verify_instance(const LineConfig& cfg, const VerifyOptions& opts);

/// Instances are drawn sequentially from one stream (deterministic for a
/// seed); trials are then evaluated concurrently.
VerifyReport verify(const VerifyOptions& opts);

/// Columns: trial,n,m,formula_s,graph_s,simulated_s,max_rel_error,agree.
void write_verify_csv(std::ostream& out, const VerifyReport& report);

}  // namespace metro
