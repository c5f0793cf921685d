#pragma once

/**
 * @file line_model.hpp
 * @brief Discretised metro line: segments, passenger demand, derived bounds.
 *
 * The line is a ring of n segments (both directions concatenated); segment
 * indices are taken modulo n. Segment j runs from node j-1 to node j and may
 * end at a platform. Times are seconds, rates passengers per second.
 */

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace metro {

/// Raised when an instance violates a structural precondition of the model
/// (x_j >= 1, m outside (0, n), inconsistent bounds, ...).
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct SegmentSpec {
    bool is_platform = true;
    double r_min = 0.0;  ///< fastest run time
    double r_nom = 0.0;  ///< nominal run time
    double g_min = 0.0;  ///< minimum safe separation time, must equal r_min + s_min
    double g_max = 0.0;  ///< maximum safe separation time
    double s_min = 0.0;  ///< minimum separation beyond the run time
    double lambda_in = 0.0;
    double lambda_out = 0.0;
    double alpha_in = 0.0;
    double alpha_out = 0.0;

    bool operator==(const SegmentSpec&) const = default;
};

/// Origin-destination demand, row-major: od[i*n + j] is lambda_ij.
struct DemandMatrix {
    std::size_t n = 0;
    std::vector<double> od;

    double operator()(std::size_t i, std::size_t j) const { return od[i * n + j]; }
    bool operator==(const DemandMatrix&) const = default;
};

struct StationDemand {
    double lambda_in = 0.0;
    double lambda_out = 0.0;

    bool operator==(const StationDemand&) const = default;
};

/// Bounds derived from a segment and its demand parameter.
struct DerivedSegment {
    double x = 0.0;      ///< demand parameter
    double X = 0.0;      ///< amplification x / (1 - x)
    double h_min = 0.0;  ///< g_min / (1 - x)
    double h_max = 0.0;  ///< g_max / (1 - x)
    double w_min = 0.0;  ///< X g_min
    double w_max = 0.0;  ///< X g_max
    double dr = 0.0;     ///< r_nom - r_min
    double dg = 0.0;     ///< g_max - g_min
    double dw = 0.0;     ///< X dg
    double dh = 0.0;     ///< h_max - h_min
};

struct DerivedParams {
    std::vector<DerivedSegment> segments;

    std::size_t size() const { return segments.size(); }
    const DerivedSegment& operator[](std::size_t j) const { return segments[j]; }
};

struct LineConfig {
    std::vector<SegmentSpec> segments;
    std::size_t trains = 0;
    /// occupancy[j] == 1 iff a train initially sits on segment j.
    std::vector<std::uint8_t> occupancy;
    /// Seed departures d^0; empty selects the stationary warm start.
    std::vector<double> initial_departures;

    std::size_t size() const { return segments.size(); }
    std::size_t prev(std::size_t j) const { return (j + size() - 1) % size(); }
    std::size_t next(std::size_t j) const { return (j + 1) % size(); }

    bool operator==(const LineConfig&) const = default;
};

/// Spreads m trains as evenly as possible over n segments.
std::vector<std::uint8_t> even_occupancy(std::size_t n, std::size_t m);

/// Checks one segment's own invariants; index is used in messages.
void validate_segment(const SegmentSpec& seg, std::size_t index);

/// Checks all invariants of a line configuration (segments, 0 < m < n,
/// occupancy sums to m, seed length). Throws ModelError.
void validate(const LineConfig& cfg);

/// x = lambda_out/alpha_out + lambda_in/alpha_in, with 0/0 terms read as 0.
/// Throws ModelError if a positive rate meets a zero capacity or x >= 1.
double demand_parameter(const SegmentSpec& seg);

/// X = x / (1 - x). Throws ModelError unless 0 <= x < 1.
double amplification(double x);

/// Throws ModelError if any segment is invalid.
DerivedParams derive_params(const LineConfig& cfg);

/// Row sums (lambda_in) and column sums (lambda_out) of an OD matrix.
/// `platforms` may be empty (every index is a platform); otherwise a nonzero
/// entry touching a non-platform index throws ModelError.
std::vector<StationDemand> aggregate_od(const DemandMatrix& dm, std::span<const std::uint8_t> platforms = {});

/// Copy of cfg with every lambda multiplied by scale.
LineConfig scale_demand(const LineConfig& cfg, double scale);

struct SegmentLinearity {
    double first_headway = 0.0;
    double h_max = 0.0;
    bool headway_ok = false;  ///< first_headway <= h_max
    double run_margin = 0.0;  ///< dr
    double dwell_margin = 0.0;  ///< X dg
    bool margin_ok = false;   ///< dr >= X dg
};

/**
 * Conditions under which the demand-controlled dynamics coincide with the
 * max-plus linear ones: every first headway within h_max and every run-time
 * margin covering the dwell margin.
 *
 * `holds` additionally requires max_j h^1_j <= min_j h_max_j. The headway
 * bound is propagated through the sup norm, so a per-segment check alone does
 * not carry over to later events when the h_max differ between segments.
 */
struct LinearityReport {
    std::vector<SegmentLinearity> segments;
    bool all_headways_ok = false;
    bool all_margins_ok = false;
    bool uniform_headway_ok = false;
    bool holds = false;
};

/// `first_headways` are h^1_j; see dynamics.hpp for computing them from a config.
LinearityReport check_linearity_conditions(const LineConfig& cfg, const DerivedParams& dp,
                                           std::span<const double> first_headways);

}  // namespace metro
