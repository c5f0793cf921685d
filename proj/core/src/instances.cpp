#include "metro/instances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "metro/analytics.hpp"
#include "metro/dynamics.hpp"

namespace metro {

double Rng::uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

std::size_t Rng::integer(std::size_t lo, std::size_t hi) {
    if (hi < lo) throw std::invalid_argument("Rng::integer: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    // Rejection keeps the mapping exact.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t v;
    do v = engine_();
    while (v >= limit);
    return lo + static_cast<std::size_t>(v % span);
}

LineConfig random_instance(Rng& rng, const InstanceOptions& opts) {
    LineConfig cfg;
    const auto n = rng.integer(opts.min_segments, opts.max_segments);
    const auto m = rng.integer(1, n - 1);
    cfg.trains = m;

    std::vector<std::size_t> slots(n);
    std::iota(slots.begin(), slots.end(), 0);
    for (std::size_t i = 0; i < m; ++i) std::swap(slots[i], slots[rng.integer(i, n - 1)]);
    cfg.occupancy.assign(n, 0);
    for (std::size_t i = 0; i < m; ++i) cfg.occupancy[slots[i]] = 1;

    std::vector<double> x(n), run_slack(n), sep_slack(n);
    for (std::size_t j = 0; j < n; ++j) {
        SegmentSpec s;
        s.is_platform = !rng.chance(opts.non_platform_probability);
        s.r_min = rng.uniform(30.0, 90.0);
        s.s_min = rng.uniform(5.0, 40.0);
        s.g_min = s.r_min + s.s_min;
        s.g_max = s.g_min;
        s.r_nom = s.r_min;
        s.alpha_in = rng.uniform(5.0, 20.0);
        s.alpha_out = rng.uniform(5.0, 20.0);
        x[j] = s.is_platform ? rng.uniform(0.0, opts.max_x) : 0.0;
        run_slack[j] = rng.uniform(0.0, 20.0);
        sep_slack[j] = rng.uniform(0.0, 20.0);
        cfg.segments.push_back(s);
    }

    const double total_x = std::accumulate(x.begin(), x.end(), 0.0);
    const double cap = 0.8 * static_cast<double>(m);
    if (opts.enforce_linearity && total_x >= cap)
        for (auto& v : x) v *= cap / total_x;

    for (std::size_t j = 0; j < n; ++j) {
        auto& s = cfg.segments[j];
        const double share = rng.uniform(0.0, 1.0);
        s.lambda_out = share * x[j] * s.alpha_out;
        s.lambda_in = (1.0 - share) * x[j] * s.alpha_in;
    }

    // Margins: with target T, g_max >= (1 - x) T so that h_max >= T, and
    // dr = X dg + slack. The headway grows with T at rate at most
    // 1.05 sum x / m < 1, so iterating T converges.
    auto set_margins = [&](const DerivedParams& dp, double target) {
        for (std::size_t j = 0; j < n; ++j) {
            auto& s = cfg.segments[j];
            s.g_max = std::max(s.g_min, (1.0 - dp[j].x) * target) + sep_slack[j];
            s.r_nom = s.r_min + dp[j].X * (s.g_max - s.g_min) + run_slack[j];
        }
    };

    auto dp = derive_params(cfg);
    if (opts.enforce_linearity) {
        double headway = 0.0;
        for (int it = 0; it < 2000; ++it) {
            set_margins(dp, 1.05 * headway + opts.headway_allowance);
            const double next = headway_formula(cfg, derive_params(cfg)).headway;
            const bool done = std::abs(next - headway) <= 1e-12 * next;
            headway = next;
            if (done) break;
        }
        set_margins(dp, 1.05 * headway + opts.headway_allowance);
    } else {
        for (std::size_t j = 0; j < n; ++j) {
            auto& s = cfg.segments[j];
            s.g_max = s.g_min + sep_slack[j];
            s.r_nom = s.r_min + run_slack[j];
        }
    }
    dp = derive_params(cfg);

    auto seed = warm_start(cfg, dp);
    for (auto& d : seed) d -= rng.uniform(0.0, opts.seed_jitter);
    cfg.initial_departures = std::move(seed);
    validate(cfg);
    return cfg;
}

}  // namespace metro
