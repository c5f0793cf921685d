#include "metro/analytics.hpp"

#include <algorithm>
#include <future>

namespace metro {

namespace {

void check_trains(const LineConfig& cfg, const DerivedParams& dp) {
    const auto n = cfg.size();
    if (cfg.trains == 0 || cfg.trains >= n)
        throw ModelError("train count must satisfy 0 < m < n (m=" + std::to_string(cfg.trains) +
                         ", n=" + std::to_string(n) + ")");
    if (dp.size() != n) throw ModelError("derived parameters do not match the line");
}

struct TermSums {
    double travel_sum = 0.0;
    double bottleneck = 0.0;
    double separation_sum = 0.0;
};

TermSums term_sums(const LineConfig& cfg, const DerivedParams& dp) {
    TermSums s;
    for (std::size_t j = 0; j < cfg.size(); ++j) {
        const auto& seg = cfg.segments[j];
        const double travel = seg.r_nom + seg.g_min * dp[j].X;
        s.travel_sum += travel;
        s.bottleneck = std::max(s.bottleneck, travel + seg.s_min);
        s.separation_sum += seg.s_min;
    }
    return s;
}

}  // namespace

std::string_view to_string(Phase phase) {
    switch (phase) {
    case Phase::FreeFlow: return "FREE_FLOW";
    case Phase::MaxFrequency: return "MAX_FREQUENCY";
    case Phase::Congested: return "CONGESTED";
    }
    return "UNKNOWN";
}

Phase classify_phase(const std::array<double, 3>& terms) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < terms.size(); ++i)
        if (terms[i] > terms[best]) best = i;
    return static_cast<Phase>(best);
}

PhaseResult headway_formula(const LineConfig& cfg, const DerivedParams& dp) {
    check_trains(cfg, dp);
    const auto s = term_sums(cfg, dp);
    const double m = static_cast<double>(cfg.trains);
    const double free = static_cast<double>(cfg.size() - cfg.trains);
    PhaseResult r;
    r.terms = {s.travel_sum / m, s.bottleneck, s.separation_sum / free};
    r.phase = classify_phase(r.terms);
    r.headway = r.terms[static_cast<std::size_t>(r.phase)];
    r.frequency = 1.0 / r.headway;
    return r;
}

FrequencyResult frequency_formula(const LineConfig& cfg, const DerivedParams& dp) {
    check_trains(cfg, dp);
    const auto s = term_sums(cfg, dp);
    FrequencyResult f;
    f.terms = {static_cast<double>(cfg.trains) / s.travel_sum, 1.0 / s.bottleneck,
               static_cast<double>(cfg.size() - cfg.trains) / s.separation_sum};
    std::size_t best = 0;
    for (std::size_t i = 1; i < f.terms.size(); ++i)
        if (f.terms[i] < f.terms[best]) best = i;
    f.phase = static_cast<Phase>(best);
    f.frequency = f.terms[best];
    return f;
}

DemandLevel demand_level(const LineConfig& cfg, const DerivedParams& dp) {
    DemandLevel level;
    std::size_t count = 0;
    const bool any_platform =
        std::any_of(cfg.segments.begin(), cfg.segments.end(), [](const auto& s) { return s.is_platform; });
    for (std::size_t j = 0; j < cfg.size(); ++j) {
        if (any_platform && !cfg.segments[j].is_platform) continue;
        level.x_mean += dp[j].x;
        level.X_mean += dp[j].X;
        ++count;
    }
    level.x_mean /= static_cast<double>(count);
    level.X_mean /= static_cast<double>(count);
    return level;
}

SweepGrid sweep(const LineConfig& cfg, std::span<const std::size_t> m_values, std::span<const double> demand_scales) {
    SweepGrid grid;
    grid.m_values.assign(m_values.begin(), m_values.end());
    grid.demand_scales.assign(demand_scales.begin(), demand_scales.end());

    auto row = [&](std::size_t m) {
        std::vector<SweepCell> cells;
        for (double scale : demand_scales) {
            SweepCell cell;
            cell.trains = m;
            cell.demand_scale = scale;
            try {
                LineConfig c = scale_demand(cfg, scale);
                c.trains = m;
                c.occupancy = even_occupancy(c.size(), m);
                c.initial_departures.clear();
                validate(c);
                const auto dp = derive_params(c);
                cell.demand = demand_level(c, dp);
                cell.result = headway_formula(c, dp);
                cell.valid = true;
            } catch (const ModelError& e) {
                cell.valid = false;
                cell.error = e.what();
            }
            cells.push_back(std::move(cell));
        }
        return cells;
    };

    std::vector<std::future<std::vector<SweepCell>>> rows;
    rows.reserve(m_values.size());
    for (auto m : m_values) rows.push_back(std::async(std::launch::async, row, m));
    for (auto& r : rows) {
        auto cells = r.get();
        std::move(cells.begin(), cells.end(), std::back_inserter(grid.cells));
    }
    return grid;
}

std::size_t optimal_train_count(const LineConfig& cfg) {
    const auto n = cfg.size();
    if (n < 3) throw ModelError("optimal_train_count needs at least 3 segments");
    std::size_t best_m = 0;
    double best_h = 0.0;
    for (std::size_t m = 1; m < n; ++m) {
        LineConfig c = cfg;
        c.trains = m;
        c.occupancy = even_occupancy(n, m);
        c.initial_departures.clear();
        const auto h = headway_formula(c, derive_params(c)).headway;
        if (best_m == 0 || h < best_h) {
            best_m = m;
            best_h = h;
        }
    }
    return best_m;
}

}  // namespace metro
