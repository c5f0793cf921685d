#include "metro/line_model.hpp"

#include <algorithm>
#include <cmath>

namespace metro {

namespace {

std::string seg_name(std::size_t j) { return "segment " + std::to_string(j); }

void require(bool ok, const std::string& what) {
    if (!ok) throw ModelError(what);
}

bool nonneg_finite(double v) { return std::isfinite(v) && v >= 0.0; }

// lambda/alpha with 0/0 read as 0.
double exchange_ratio(double lambda, double alpha, const std::string& where) {
    if (lambda == 0.0) return 0.0;
    if (alpha == 0.0) throw ModelError(where + ": positive demand with zero exchange rate");
    return lambda / alpha;
}

}  // namespace

std::vector<std::uint8_t> even_occupancy(std::size_t n, std::size_t m) {
    if (n == 0 || m == 0 || m >= n) throw ModelError("train count must satisfy 0 < m < n");
    std::vector<std::uint8_t> b(n, 0);
    for (std::size_t i = 0; i < m; ++i) b[i * n / m] = 1;
    return b;
}

void validate_segment(const SegmentSpec& seg, std::size_t j) {
    const auto name = seg_name(j);
    for (double v : {seg.r_min, seg.r_nom, seg.g_min, seg.g_max, seg.s_min})
        require(nonneg_finite(v), name + ": times must be finite and >= 0");
    for (double v : {seg.lambda_in, seg.lambda_out, seg.alpha_in, seg.alpha_out})
        require(nonneg_finite(v), name + ": rates must be finite and >= 0");
    require(seg.r_min <= seg.r_nom, name + ": r_min must not exceed r_nom");
    require(seg.g_min <= seg.g_max, name + ": g_min must not exceed g_max");
    const double sum = seg.r_min + seg.s_min;
    require(std::abs(seg.g_min - sum) <= 1e-9 * std::max(1.0, std::abs(sum)),
            name + ": g_min must equal r_min + s_min");
    if (!seg.is_platform)
        require(seg.lambda_in == 0.0 && seg.lambda_out == 0.0, name + ": non-platform segment with passenger demand");
}

void validate(const LineConfig& cfg) {
    const auto n = cfg.size();
    require(n >= 2, "line needs at least 2 segments");
    for (std::size_t j = 0; j < n; ++j) validate_segment(cfg.segments[j], j);
    require(cfg.trains > 0 && cfg.trains < n,
            "train count must satisfy 0 < m < n (m=" + std::to_string(cfg.trains) + ", n=" + std::to_string(n) + ")");
    require(cfg.occupancy.size() == n, "occupancy must list one entry per segment");
    std::size_t total = 0;
    for (auto b : cfg.occupancy) {
        require(b <= 1, "occupancy entries must be 0 or 1");
        total += b;
    }
    require(total == cfg.trains, "occupancy must sum to the train count");
    if (!cfg.initial_departures.empty()) {
        require(cfg.initial_departures.size() == n, "initial_departures must list one entry per segment");
        for (double d : cfg.initial_departures) require(std::isfinite(d), "initial_departures must be finite");
    }
}

double demand_parameter(const SegmentSpec& seg) {
    const double x = exchange_ratio(seg.lambda_out, seg.alpha_out, "alighting") +
                     exchange_ratio(seg.lambda_in, seg.alpha_in, "boarding");
    if (!(x < 1.0)) throw ModelError("demand parameter x = " + std::to_string(x) + " >= 1 (demand exceeds exchange capacity)");
    return x;
}

double amplification(double x) {
    if (!(x >= 0.0 && x < 1.0)) throw ModelError("amplification requires 0 <= x < 1");
    return x / (1.0 - x);
}

DerivedParams derive_params(const LineConfig& cfg) {
    DerivedParams dp;
    dp.segments.reserve(cfg.size());
    for (std::size_t j = 0; j < cfg.size(); ++j) {
        const auto& seg = cfg.segments[j];
        validate_segment(seg, j);
        DerivedSegment d;
        try {
            d.x = demand_parameter(seg);
        } catch (const ModelError& e) {
            throw ModelError(seg_name(j) + ": " + e.what());
        }
        d.X = amplification(d.x);
        d.h_min = seg.g_min / (1.0 - d.x);
        d.h_max = seg.g_max / (1.0 - d.x);
        d.w_min = d.X * seg.g_min;
        d.w_max = d.X * seg.g_max;
        d.dr = seg.r_nom - seg.r_min;
        d.dg = seg.g_max - seg.g_min;
        d.dw = d.X * d.dg;
        d.dh = d.h_max - d.h_min;
        dp.segments.push_back(d);
    }
    return dp;
}

std::vector<StationDemand> aggregate_od(const DemandMatrix& dm, std::span<const std::uint8_t> platforms) {
    const auto n = dm.n;
    require(dm.od.size() == n * n, "OD matrix must be square");
    require(platforms.empty() || platforms.size() == n, "platform mask must match OD dimension");
    std::vector<StationDemand> out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double v = dm(i, j);
            require(nonneg_finite(v), "OD entries must be finite and >= 0");
            if (v == 0.0) continue;
            if (!platforms.empty())
                require(platforms[i] && platforms[j], "OD entry (" + std::to_string(i) + "," + std::to_string(j) +
                                                          ") touches a non-platform segment");
            out[i].lambda_in += v;
            out[j].lambda_out += v;
        }
    return out;
}

LineConfig scale_demand(const LineConfig& cfg, double scale) {
    require(nonneg_finite(scale), "demand scale must be finite and >= 0");
    LineConfig out = cfg;
    for (auto& seg : out.segments) {
        seg.lambda_in *= scale;
        seg.lambda_out *= scale;
    }
    return out;
}

LinearityReport check_linearity_conditions(const LineConfig& cfg, const DerivedParams& dp,
                                           std::span<const double> first_headways) {
    const auto n = cfg.size();
    require(dp.size() == n && first_headways.size() == n, "linearity check: size mismatch");
    LinearityReport report;
    report.all_headways_ok = true;
    report.all_margins_ok = true;
    double max_h1 = 0.0;
    double min_hmax = dp[0].h_max;
    for (std::size_t j = 0; j < n; ++j) {
        SegmentLinearity s;
        s.first_headway = first_headways[j];
        s.h_max = dp[j].h_max;
        s.headway_ok = s.first_headway <= s.h_max;
        s.run_margin = dp[j].dr;
        s.dwell_margin = dp[j].dw;
        s.margin_ok = s.run_margin >= s.dwell_margin;
        report.all_headways_ok = report.all_headways_ok && s.headway_ok;
        report.all_margins_ok = report.all_margins_ok && s.margin_ok;
        max_h1 = std::max(max_h1, s.first_headway);
        min_hmax = std::min(min_hmax, s.h_max);
        report.segments.push_back(s);
    }
    report.uniform_headway_ok = max_h1 <= min_hmax;
    report.holds = report.all_headways_ok && report.all_margins_ok && report.uniform_headway_ok;
    return report;
}

}  // namespace metro
