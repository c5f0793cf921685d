#pragma once

/**
 * @file dynamics.hpp
 * @brief Event-by-event departure times on the ring line.
 *
 * For every event k and segment j the departure d^k_j is the earliest time
 * satisfying
 *   (travel)      d^k_j >= d^{k - b_j}_{j-1}     + t_j(h^k_j)
 *   (separation)  d^k_j >= d^{k - 1 + b_{j+1}}_{j+1} + s_min_{j+1}
 * with h^k_j = d^k_j - d^{k-1}_j. When the travel time depends on the headway
 * the travel constraint is implicit in d^k_j; it is solved exactly as a scalar
 * piecewise-linear fixed point.
 */

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "metro/event_graph.hpp"
#include "metro/line_model.hpp"

namespace metro {

class DynamicsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ControlMode {
    Linearized,      ///< constant travel time r_nom + X g_min
    FullControl,     ///< dwell min(x h, w_max) plus run max(r_min, r_nom - x (h - h_min))
    BaselineUpload,  ///< dwell (lambda_in/alpha_in) h, run r_nom
    BaselineTheta,   ///< dwell max(0, w_max - theta (lambda_in/alpha_in) h), run r_nom
};

std::string_view to_string(ControlMode mode);
/// Accepts "linearized", "full", "baseline-upload", "baseline-theta".
ControlMode parse_control_mode(std::string_view name);

struct ControlLaw {
    ControlMode mode = ControlMode::Linearized;
    /// Per-segment gain, present iff mode == BaselineTheta.
    std::vector<double> theta;

    static ControlLaw linearized() { return {ControlMode::Linearized, {}}; }
    static ControlLaw full_control() { return {ControlMode::FullControl, {}}; }
    static ControlLaw baseline_upload() { return {ControlMode::BaselineUpload, {}}; }
    static ControlLaw baseline_theta(std::vector<double> theta) { return {ControlMode::BaselineTheta, std::move(theta)}; }

    bool operator==(const ControlLaw&) const = default;
};

/// Throws ModelError if the law is malformed for cfg or its implicit
/// headway equation is not a contraction (slope magnitude >= 1).
void validate_law(const LineConfig& cfg, const ControlLaw& law);

/// min(x h, w_max)
double dwell_time(double headway, const SegmentSpec& seg, const DerivedSegment& ds);
/// max(r_min, r_nom - x (h - h_min))
double run_time(double headway, const SegmentSpec& seg, const DerivedSegment& ds);

struct TravelSplit {
    double dwell = 0.0;
    double run = 0.0;
    double total() const { return dwell + run; }
};

TravelSplit travel_split(double headway, const SegmentSpec& seg, const DerivedSegment& ds,
                         const ControlLaw& law, std::size_t segment);

double travel_time(double headway, const SegmentSpec& seg, const DerivedSegment& ds,
                   const ControlLaw& law, std::size_t segment);

/// t(h) = intercept + slope * h for lo <= h < hi.
struct AffinePiece {
    double lo;
    double hi;
    double intercept;
    double slope;
};

/// Travel time of one segment as consecutive affine pieces covering the real line.
std::vector<AffinePiece> travel_pieces(const SegmentSpec& seg, const DerivedSegment& ds,
                                       const ControlLaw& law, std::size_t segment);

/**
 * Smallest d with d >= separation and d >= upstream + t(d - previous), for a
 * piecewise-affine t whose slopes lie in (-1, 1). Throws DynamicsError if no
 * piece admits a consistent solution.
 */
double earliest_departure(double separation, double upstream, double previous,
                          std::span<const AffinePiece> travel);

struct Perturbation {
    std::size_t segment = 0;
    std::size_t event = 0;
    double delay = 0.0;

    bool operator==(const Perturbation&) const = default;
};

/// Rows k = 0..K; row 0 holds the seed d^0 (dwell/run/headway zero there).
class TrajectoryLog {
public:
    TrajectoryLog() = default;
    TrajectoryLog(std::size_t events, std::size_t segments);

    std::size_t events() const { return events_; }
    std::size_t segments() const { return segments_; }

    double& departure(std::size_t k, std::size_t j) { return departure_[k * segments_ + j]; }
    double departure(std::size_t k, std::size_t j) const { return departure_[k * segments_ + j]; }
    double& dwell(std::size_t k, std::size_t j) { return dwell_[k * segments_ + j]; }
    double dwell(std::size_t k, std::size_t j) const { return dwell_[k * segments_ + j]; }
    double& run(std::size_t k, std::size_t j) { return run_[k * segments_ + j]; }
    double run(std::size_t k, std::size_t j) const { return run_[k * segments_ + j]; }
    double& headway(std::size_t k, std::size_t j) { return headway_[k * segments_ + j]; }
    double headway(std::size_t k, std::size_t j) const { return headway_[k * segments_ + j]; }

    std::span<const double> departures(std::size_t k) const {
        return {departure_.data() + k * segments_, segments_};
    }

    bool operator==(const TrajectoryLog&) const = default;

private:
    std::size_t events_ = 0;
    std::size_t segments_ = 0;
    std::vector<double> departure_, dwell_, run_, headway_;
};

/**
 * Event graph of the linear dynamics: edge (j-1 -> j) with weight
 * r_nom_j + X_j g_min_j and shift b_j, edge (j+1 -> j) with weight
 * s_min_{j+1} and shift 1 - b_{j+1}.
 */
EventGraph build_event_graph(const LineConfig& cfg, const DerivedParams& dp);

/// Stationary seed: eigenvector of the linear dynamics, min entry 0.
std::vector<double> warm_start(const LineConfig& cfg, const DerivedParams& dp);

/// cfg.initial_departures, or warm_start when empty.
std::vector<double> seed_departures(const LineConfig& cfg, const DerivedParams& dp);

/// h^1 = d^1 - d^0 under the linear dynamics.
std::vector<double> first_headways(const LineConfig& cfg, const DerivedParams& dp);

LinearityReport check_linearity_conditions(const LineConfig& cfg, const DerivedParams& dp);

/// Precomputed per-segment laws and evaluation order for one configuration.
class LineDynamics {
public:
    LineDynamics(const LineConfig& cfg, const DerivedParams& dp, ControlLaw law);

    /// Fills row k of log from rows < k, adding matching perturbations.
    void step(TrajectoryLog& log, std::size_t k, std::span<const Perturbation> perturbations = {}) const;

    /// K events from the configured seed.
    TrajectoryLog simulate(std::size_t events, std::span<const Perturbation> perturbations = {}) const;
    TrajectoryLog simulate(std::size_t events, std::span<const double> seed,
                           std::span<const Perturbation> perturbations) const;

    const std::vector<std::size_t>& evaluation_order() const { return order_; }

private:
    LineConfig cfg_;
    DerivedParams dp_;
    ControlLaw law_;
    std::vector<std::vector<AffinePiece>> pieces_;
    std::vector<std::size_t> order_;
    std::vector<double> seed_;
};

void step(const LineConfig& cfg, const DerivedParams& dp, const ControlLaw& law, TrajectoryLog& log,
          std::size_t k);

TrajectoryLog simulate(const LineConfig& cfg, const DerivedParams& dp, const ControlLaw& law,
                       std::size_t events, std::span<const Perturbation> perturbations = {});

struct HeadwayEstimate {
    double headway = 0.0;       ///< estimate over the full window
    double half_window = 0.0;   ///< estimate over the last window/2 events
    double delta = 0.0;         ///< |headway - half_window|
    std::size_t window = 0;
    bool converged = false;
};

/**
 * Mean over segments of (d^K_j - d^{K-W}_j) / W, and the same over W/2.
 * Converged when delta <= rel_tol * headway. Throws std::invalid_argument
 * unless 2 <= W, W even and 2W <= K.
 */
HeadwayEstimate asymptotic_headway(const TrajectoryLog& log, std::size_t window, double rel_tol = 1e-9);

/// Events discarded before estimating: max(10 n, 5 m).
std::size_t default_warmup(const LineConfig& cfg);

/**
 * Largest window W <= min(K/2, K - warmup) that is a multiple of
 * 2 lcm(m, n - m), so both W and W/2 span whole periods of the stationary
 * regime. Falls back to the largest even W <= K/2.
 */
std::size_t default_window(const LineConfig& cfg, std::size_t events);

}  // namespace metro
