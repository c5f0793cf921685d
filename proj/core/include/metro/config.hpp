#pragma once

/**
 * @file config.hpp
 * @brief JSON configuration documents.
 *
 * Schema (version 1), times in seconds, rates in passengers per second:
 *
 *   {
 *     "schema_version": 1,
 *     "line": {
 *       "segments": [ { "platform": true, "r_min": 50, "r_nom": 60, "s_min": 40,
 *                       "g_min": 90, "g_max": 150, "alpha_in": 2, "alpha_out": 2 }, ... ],
 *       "trains": 6,
 *       "occupancy": [1, 0, ...],            // optional, default evenly spread
 *       "initial_departures": [0.0, ...]     // optional, default stationary warm start
 *     },
 *     "demand": { "per_segment": [ { "lambda_in": 0.1, "lambda_out": 0.1 }, ... ] }
 *            or { "od": [[...], ...] },
 *     "control": { "law": "full", "theta": [...] },        // optional
 *     "simulation": { "events": 2000, "warmup": 180, "window": 400,
 *                     "perturbations": [ { "segment": 2, "event": 10, "delay": 30 } ] }  // optional
 *   }
 *
 * g_min may be omitted and then defaults to r_min + s_min. alpha_* default
 * to 0. Unknown keys are rejected everywhere.
 */

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "metro/dynamics.hpp"
#include "metro/line_model.hpp"

namespace metro {

/// Malformed JSON; message carries the byte offset.
class ConfigParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Well-formed JSON that does not match the schema; message names the field.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;

struct DemandSpec {
    /// Exactly one of the two is set.
    std::optional<DemandMatrix> od;
    std::optional<std::vector<StationDemand>> per_segment;

    bool operator==(const DemandSpec&) const = default;
};

struct SimulationSettings {
    std::size_t events = 2000;
    std::optional<std::size_t> warmup;
    std::optional<std::size_t> window;
    std::vector<Perturbation> perturbations;

    bool operator==(const SimulationSettings&) const = default;
};

struct ConfigDocument {
    int schema_version = kSchemaVersion;
    /// Segment lambdas are filled in from `demand`.
    LineConfig line;
    DemandSpec demand;
    ControlLaw control = ControlLaw::full_control();
    SimulationSettings simulation;

    bool operator==(const ConfigDocument&) const = default;
};

/// Parses and validates. Throws ConfigParseError, SchemaError or ModelError.
ConfigDocument parse_config(std::string_view json_text);

/// Reads a file and parses it; unreadable files raise SchemaError.
ConfigDocument load_config(const std::filesystem::path& path);

/// Pretty-printed JSON; parse_config(serialize_config(doc)) == doc.
std::string serialize_config(const ConfigDocument& doc);

/// Builds a document from an already-populated line (lambdas taken per segment).
ConfigDocument make_document(const LineConfig& line, ControlLaw control = ControlLaw::full_control(),
                             SimulationSettings simulation = {});

}  // namespace metro
