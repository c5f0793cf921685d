#include "metro/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "metro/cycle_ratio.hpp"

namespace metro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double upload_ratio(const SegmentSpec& seg) {
    if (seg.lambda_in == 0.0) return 0.0;
    if (seg.alpha_in == 0.0) throw ModelError("positive boarding demand with zero boarding rate");
    return seg.lambda_in / seg.alpha_in;
}

// Two affine branches meeting at bp: (left_a + left_s h) for h < bp, else (right_a + right_s h).
struct Branches {
    double bp = kInf;
    double left_a = 0.0;
    double left_s = 0.0;
    double right_a = 0.0;
    double right_s = 0.0;
};

Branches constant(double a) { return {kInf, a, 0.0, a, 0.0}; }

struct LawBranches {
    Branches dwell;
    Branches run;
};

LawBranches law_branches(const SegmentSpec& seg, const DerivedSegment& ds, const ControlLaw& law, std::size_t j) {
    switch (law.mode) {
    case ControlMode::Linearized:
        return {constant(ds.w_min), constant(seg.r_nom)};
    case ControlMode::FullControl: {
        if (ds.x == 0.0) return {constant(0.0), constant(seg.r_nom)};
        // x h_min is written as w_min so the unsaturated sum matches the linear law bit for bit.
        return {{ds.w_max / ds.x, 0.0, ds.x, ds.w_max, 0.0},
                {ds.h_min + ds.dr / ds.x, seg.r_nom + ds.w_min, -ds.x, seg.r_min, 0.0}};
    }
    case ControlMode::BaselineUpload: {
        const double rho = upload_ratio(seg);
        return {{kInf, 0.0, rho, 0.0, rho}, constant(seg.r_nom)};
    }
    case ControlMode::BaselineTheta: {
        const double c = law.theta.at(j) * upload_ratio(seg);
        if (c == 0.0) return {constant(ds.w_max), constant(seg.r_nom)};
        return {{ds.w_max / c, ds.w_max, -c, 0.0, 0.0}, constant(seg.r_nom)};
    }
    }
    throw std::logic_error("unknown control mode");
}

std::size_t lcm_size(std::size_t a, std::size_t b) { return a / std::gcd(a, b) * b; }

}  // namespace

std::string_view to_string(ControlMode mode) {
    switch (mode) {
    case ControlMode::Linearized: return "linearized";
    case ControlMode::FullControl: return "full";
    case ControlMode::BaselineUpload: return "baseline-upload";
    case ControlMode::BaselineTheta: return "baseline-theta";
    }
    return "unknown";
}

ControlMode parse_control_mode(std::string_view name) {
    for (auto m : {ControlMode::Linearized, ControlMode::FullControl, ControlMode::BaselineUpload,
                   ControlMode::BaselineTheta})
        if (to_string(m) == name) return m;
    throw std::invalid_argument("unknown control law '" + std::string(name) +
                                "' (expected linearized, full, baseline-upload or baseline-theta)");
}

void validate_law(const LineConfig& cfg, const ControlLaw& law) {
    const bool theta_mode = law.mode == ControlMode::BaselineTheta;
    if (theta_mode && law.theta.size() != cfg.size())
        throw ModelError("baseline-theta law needs one theta per segment");
    if (!theta_mode && !law.theta.empty()) throw ModelError("theta is only allowed with the baseline-theta law");
    for (std::size_t j = 0; j < cfg.size(); ++j) {
        const auto& seg = cfg.segments[j];
        const auto where = "segment " + std::to_string(j);
        if (law.mode == ControlMode::BaselineUpload && upload_ratio(seg) >= 1.0)
            throw ModelError(where + ": baseline-upload slope lambda_in/alpha_in >= 1 (no unique departure)");
        if (theta_mode) {
            const double theta = law.theta[j];
            if (!std::isfinite(theta) || theta < 0.0) throw ModelError(where + ": theta must be finite and >= 0");
            if (theta * upload_ratio(seg) >= 1.0)
                throw ModelError(where + ": baseline-theta slope theta*lambda_in/alpha_in >= 1 (no unique departure)");
        }
    }
}

double dwell_time(double headway, const SegmentSpec&, const DerivedSegment& ds) {
    return std::min(ds.x * headway, ds.w_max);
}

double run_time(double headway, const SegmentSpec& seg, const DerivedSegment& ds) {
    return std::max(seg.r_min, seg.r_nom - ds.x * (headway - ds.h_min));
}

TravelSplit travel_split(double headway, const SegmentSpec& seg, const DerivedSegment& ds, const ControlLaw& law,
                         std::size_t segment) {
    switch (law.mode) {
    case ControlMode::Linearized: return {ds.w_min, seg.r_nom};
    case ControlMode::FullControl: return {dwell_time(headway, seg, ds), run_time(headway, seg, ds)};
    case ControlMode::BaselineUpload: return {upload_ratio(seg) * headway, seg.r_nom};
    case ControlMode::BaselineTheta:
        return {std::max(0.0, ds.w_max - law.theta.at(segment) * upload_ratio(seg) * headway), seg.r_nom};
    }
    throw std::logic_error("unknown control mode");
}

double travel_time(double headway, const SegmentSpec& seg, const DerivedSegment& ds, const ControlLaw& law,
                   std::size_t segment) {
    return travel_split(headway, seg, ds, law, segment).total();
}

std::vector<AffinePiece> travel_pieces(const SegmentSpec& seg, const DerivedSegment& ds, const ControlLaw& law,
                                       std::size_t segment) {
    const auto [dwell, run] = law_branches(seg, ds, law, segment);
    std::vector<double> cuts{-kInf};
    for (double bp : {std::min(dwell.bp, run.bp), std::max(dwell.bp, run.bp)})
        if (std::isfinite(bp) && bp != cuts.back()) cuts.push_back(bp);
    cuts.push_back(kInf);

    std::vector<AffinePiece> pieces;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        const bool dwell_left = hi <= dwell.bp;
        const bool run_left = hi <= run.bp;
        const double a = (dwell_left ? dwell.left_a : dwell.right_a) + (run_left ? run.left_a : run.right_a);
        const double s = (dwell_left ? dwell.left_s : dwell.right_s) + (run_left ? run.left_s : run.right_s);
        pieces.push_back({lo, hi, a, s});
    }
    return pieces;
}

double earliest_departure(double separation, double upstream, double previous, std::span<const AffinePiece> travel) {
    // h - t(h) is strictly increasing when every slope is below 1, so exactly
    // one piece holds the root of d = upstream + t(d - previous).
    double root = 0.0;
    double best_violation = kInf;
    for (const auto& p : travel) {
        const double d = p.slope == 0.0 ? upstream + p.intercept
                                         : (upstream + p.intercept - p.slope * previous) / (1.0 - p.slope);
        const double h = d - previous;
        const double violation = std::max({0.0, p.lo - h, h - p.hi});
        if (violation < best_violation) {
            best_violation = violation;
            root = d;
            if (violation == 0.0) break;
        }
    }
    const double scale = std::max({1.0, std::abs(upstream), std::abs(previous)});
    if (!(best_violation <= 1e-9 * scale))
        throw DynamicsError("travel-time fixed point has no consistent solution");
    return std::max(separation, root);
}

TrajectoryLog::TrajectoryLog(std::size_t events, std::size_t segments)
    : events_(events),
      segments_(segments),
      departure_((events + 1) * segments, 0.0),
      dwell_((events + 1) * segments, 0.0),
      run_((events + 1) * segments, 0.0),
      headway_((events + 1) * segments, 0.0) {}

EventGraph build_event_graph(const LineConfig& cfg, const DerivedParams& dp) {
    validate(cfg);
    if (dp.size() != cfg.size()) throw ModelError("derived parameters do not match the line");
    const auto n = cfg.size();
    std::vector<EventEdge> edges;
    edges.reserve(2 * n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto up = cfg.prev(j);
        const auto down = cfg.next(j);
        edges.push_back({up, j, cfg.segments[j].r_nom + dp[j].w_min, cfg.occupancy[j]});
        edges.push_back({down, j, cfg.segments[down].s_min, 1u - cfg.occupancy[down]});
    }
    return EventGraph(n, std::move(edges));
}

std::vector<double> warm_start(const LineConfig& cfg, const DerivedParams& dp) {
    return eigenvector(build_event_graph(cfg, dp));
}

std::vector<double> seed_departures(const LineConfig& cfg, const DerivedParams& dp) {
    if (!cfg.initial_departures.empty()) return cfg.initial_departures;
    return warm_start(cfg, dp);
}

std::vector<double> first_headways(const LineConfig& cfg, const DerivedParams& dp) {
    const LineDynamics lin(cfg, dp, ControlLaw::linearized());
    const auto log = lin.simulate(1);
    std::vector<double> h(cfg.size());
    for (std::size_t j = 0; j < cfg.size(); ++j) h[j] = log.headway(1, j);
    return h;
}

LinearityReport check_linearity_conditions(const LineConfig& cfg, const DerivedParams& dp) {
    const auto h1 = first_headways(cfg, dp);
    return check_linearity_conditions(cfg, dp, h1);
}

LineDynamics::LineDynamics(const LineConfig& cfg, const DerivedParams& dp, ControlLaw law)
    : cfg_(cfg), dp_(dp), law_(std::move(law)) {
    validate_law(cfg_, law_);
    const auto graph = build_event_graph(cfg_, dp_);
    order_ = graph.zero_shift_order();
    pieces_.reserve(cfg_.size());
    for (std::size_t j = 0; j < cfg_.size(); ++j)
        pieces_.push_back(travel_pieces(cfg_.segments[j], dp_[j], law_, j));
    seed_ = seed_departures(cfg_, dp_);
}

void LineDynamics::step(TrajectoryLog& log, std::size_t k, std::span<const Perturbation> perturbations) const {
    if (k == 0 || k > log.events()) throw std::out_of_range("step: event index out of range");
    if (log.segments() != cfg_.size()) throw std::invalid_argument("step: log does not match the line");
    for (auto j : order_) {
        const auto up = cfg_.prev(j);
        const auto down = cfg_.next(j);
        const double upstream = log.departure(k - cfg_.occupancy[j], up);
        const double separation = log.departure(k - 1 + cfg_.occupancy[down], down) + cfg_.segments[down].s_min;
        const double previous = log.departure(k - 1, j);

        double d = earliest_departure(separation, upstream, previous, pieces_[j]);
        const double h_law = d - previous;
        for (const auto& p : perturbations)
            if (p.segment == j && p.event == k) d += p.delay;

        const double run = travel_split(h_law, cfg_.segments[j], dp_[j], law_, j).run;
        log.departure(k, j) = d;
        log.headway(k, j) = d - previous;
        log.run(k, j) = run;
        log.dwell(k, j) = d - upstream - run;
    }
}

TrajectoryLog LineDynamics::simulate(std::size_t events, std::span<const Perturbation> perturbations) const {
    return simulate(events, seed_, perturbations);
}

TrajectoryLog LineDynamics::simulate(std::size_t events, std::span<const double> seed,
                                     std::span<const Perturbation> perturbations) const {
    const auto n = cfg_.size();
    if (events == 0) throw std::invalid_argument("simulate: need at least one event");
    if (seed.size() != n) throw std::invalid_argument("simulate: seed must list one departure per segment");
    for (const auto& p : perturbations) {
        if (p.segment >= n || p.event == 0 || p.event > events || !std::isfinite(p.delay) || p.delay < 0.0)
            throw std::invalid_argument("perturbation out of range (segment < n, 1 <= event <= K, delay >= 0)");
    }
    TrajectoryLog log(events, n);
    for (std::size_t j = 0; j < n; ++j) log.departure(0, j) = seed[j];
    for (std::size_t k = 1; k <= events; ++k) {
        step(log, k, perturbations);
        for (std::size_t j = 0; j < n; ++j) {
            const double tol = 1e-9 * std::max(1.0, std::abs(log.departure(k, j)));
            if (log.headway(k, j) < -tol)
                throw DynamicsError("departures decreased at segment " + std::to_string(j) + ", event " +
                                    std::to_string(k) + ": inconsistent initial departures");
        }
    }
    return log;
}

void step(const LineConfig& cfg, const DerivedParams& dp, const ControlLaw& law, TrajectoryLog& log, std::size_t k) {
    LineDynamics(cfg, dp, law).step(log, k);
}

TrajectoryLog simulate(const LineConfig& cfg, const DerivedParams& dp, const ControlLaw& law, std::size_t events,
                       std::span<const Perturbation> perturbations) {
    return LineDynamics(cfg, dp, law).simulate(events, perturbations);
}

HeadwayEstimate asymptotic_headway(const TrajectoryLog& log, std::size_t window, double rel_tol) {
    const auto K = log.events();
    if (window < 2 || window % 2 != 0 || 2 * window > K)
        throw std::invalid_argument("asymptotic_headway: window must be even, >= 2 and at most K/2 (K=" +
                                    std::to_string(K) + ", window=" + std::to_string(window) + ")");
    const auto n = log.segments();
    auto mean_rate = [&](std::size_t w) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) sum += (log.departure(K, j) - log.departure(K - w, j)) / double(w);
        return sum / double(n);
    };
    HeadwayEstimate est;
    est.window = window;
    est.headway = mean_rate(window);
    est.half_window = mean_rate(window / 2);
    est.delta = std::abs(est.headway - est.half_window);
    est.converged = est.delta <= rel_tol * std::abs(est.headway);
    return est;
}

std::size_t default_warmup(const LineConfig& cfg) { return std::max(10 * cfg.size(), 5 * cfg.trains); }

std::size_t default_window(const LineConfig& cfg, std::size_t events) {
    const auto m = cfg.trains;
    const auto n = cfg.size();
    if (m == 0 || m >= n) throw ModelError("train count must satisfy 0 < m < n");
    const auto period = 2 * lcm_size(m, n - m);
    const auto warmup = default_warmup(cfg);
    std::size_t limit = events / 2;
    if (events > warmup) limit = std::min(limit, events - warmup);
    std::size_t w = limit / period * period;
    if (w == 0) w = (events / 2) / 2 * 2;
    if (w < 2) throw std::invalid_argument("default_window: too few events for an estimate");
    return w;
}

}  // namespace metro
