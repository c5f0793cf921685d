#include "metro/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace metro {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void schema_fail(const std::string& where, const std::string& what) {
    throw SchemaError(where + ": " + what);
}

void expect_object(const json& j, const std::string& where) {
    if (!j.is_object()) schema_fail(where, "expected an object");
}

void allow_keys(const json& obj, std::initializer_list<std::string_view> keys, const std::string& where) {
    expect_object(obj, where);
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (auto k : keys) known = known || key == k;
        if (!known) schema_fail(where + "." + key, "unknown key");
    }
}

const json& require_key(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) schema_fail(where + "." + key, "missing required key");
    return *it;
}

double as_number(const json& j, const std::string& where) {
    if (!j.is_number()) schema_fail(where, "expected a number");
    return j.get<double>();
}

std::size_t as_count(const json& j, const std::string& where) {
    if (j.is_number_unsigned()) return j.get<std::size_t>();
    if (j.is_number_integer() && j.get<long long>() >= 0) return static_cast<std::size_t>(j.get<long long>());
    schema_fail(where, "expected a non-negative integer");
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
    auto it = obj.find(key);
    return it == obj.end() ? fallback : as_number(*it, where + "." + key);
}

const json& expect_array(const json& j, const std::string& where) {
    if (!j.is_array()) schema_fail(where, "expected an array");
    return j;
}

std::vector<double> number_array(const json& j, const std::string& where) {
    expect_array(j, where);
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

SegmentSpec parse_segment(const json& j, const std::string& where) {
    allow_keys(j, {"platform", "r_min", "r_nom", "s_min", "g_min", "g_max", "alpha_in", "alpha_out"}, where);
    SegmentSpec s;
    if (auto it = j.find("platform"); it != j.end()) {
        if (!it->is_boolean()) schema_fail(where + ".platform", "expected a boolean");
        s.is_platform = it->get<bool>();
    }
    s.r_min = as_number(require_key(j, "r_min", where), where + ".r_min");
    s.r_nom = as_number(require_key(j, "r_nom", where), where + ".r_nom");
    s.s_min = as_number(require_key(j, "s_min", where), where + ".s_min");
    s.g_max = as_number(require_key(j, "g_max", where), where + ".g_max");
    s.g_min = number_or(j, "g_min", s.r_min + s.s_min, where);
    s.alpha_in = number_or(j, "alpha_in", 0.0, where);
    s.alpha_out = number_or(j, "alpha_out", 0.0, where);
    return s;
}

DemandSpec parse_demand(const json& j, std::size_t n) {
    const std::string where = "demand";
    allow_keys(j, {"od", "per_segment"}, where);
    const bool has_od = j.contains("od");
    const bool has_per = j.contains("per_segment");
    if (has_od == has_per) schema_fail(where, "exactly one of 'od' or 'per_segment' is required");

    DemandSpec d;
    if (has_od) {
        const auto& rows = expect_array(j["od"], where + ".od");
        if (rows.size() != n) schema_fail(where + ".od", "expected " + std::to_string(n) + " rows");
        DemandMatrix dm{n, {}};
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = number_array(rows[i], where + ".od[" + std::to_string(i) + "]");
            if (row.size() != n) schema_fail(where + ".od[" + std::to_string(i) + "]", "expected " + std::to_string(n) + " columns");
            dm.od.insert(dm.od.end(), row.begin(), row.end());
        }
        d.od = std::move(dm);
    } else {
        const auto& items = expect_array(j["per_segment"], where + ".per_segment");
        if (items.size() != n) schema_fail(where + ".per_segment", "expected one entry per segment (" + std::to_string(n) + ")");
        std::vector<StationDemand> per;
        for (std::size_t i = 0; i < n; ++i) {
            const auto w = where + ".per_segment[" + std::to_string(i) + "]";
            allow_keys(items[i], {"lambda_in", "lambda_out"}, w);
            per.push_back({number_or(items[i], "lambda_in", 0.0, w), number_or(items[i], "lambda_out", 0.0, w)});
        }
        d.per_segment = std::move(per);
    }
    return d;
}

void apply_demand(LineConfig& line, const DemandSpec& demand) {
    std::vector<StationDemand> per;
    if (demand.od) {
        std::vector<std::uint8_t> mask;
        for (const auto& s : line.segments) mask.push_back(s.is_platform ? 1 : 0);
        per = aggregate_od(*demand.od, mask);
    } else {
        per = *demand.per_segment;
    }
    for (std::size_t j = 0; j < line.size(); ++j) {
        line.segments[j].lambda_in = per[j].lambda_in;
        line.segments[j].lambda_out = per[j].lambda_out;
    }
}

ControlLaw parse_control(const json& j, std::size_t n) {
    allow_keys(j, {"law", "theta"}, "control");
    ControlLaw law;
    const auto& name = require_key(j, "law", "control");
    if (!name.is_string()) schema_fail("control.law", "expected a string");
    try {
        law.mode = parse_control_mode(name.get<std::string>());
    } catch (const std::invalid_argument& e) {
        schema_fail("control.law", e.what());
    }
    if (auto it = j.find("theta"); it != j.end()) {
        law.theta = number_array(*it, "control.theta");
        if (law.mode != ControlMode::BaselineTheta) schema_fail("control.theta", "only allowed with law 'baseline-theta'");
        if (law.theta.size() != n) schema_fail("control.theta", "expected one entry per segment");
    } else if (law.mode == ControlMode::BaselineTheta) {
        schema_fail("control.theta", "required by law 'baseline-theta'");
    }
    return law;
}

SimulationSettings parse_simulation(const json& j, std::size_t n) {
    const std::string where = "simulation";
    allow_keys(j, {"events", "warmup", "window", "perturbations"}, where);
    SimulationSettings s;
    if (auto it = j.find("events"); it != j.end()) s.events = as_count(*it, where + ".events");
    if (s.events < 2) schema_fail(where + ".events", "must be at least 2");
    if (auto it = j.find("warmup"); it != j.end()) s.warmup = as_count(*it, where + ".warmup");
    if (auto it = j.find("window"); it != j.end()) s.window = as_count(*it, where + ".window");
    if (auto it = j.find("perturbations"); it != j.end()) {
        expect_array(*it, where + ".perturbations");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto w = where + ".perturbations[" + std::to_string(i) + "]";
            const auto& p = (*it)[i];
            allow_keys(p, {"segment", "event", "delay"}, w);
            Perturbation pert;
            pert.segment = as_count(require_key(p, "segment", w), w + ".segment");
            pert.event = as_count(require_key(p, "event", w), w + ".event");
            pert.delay = as_number(require_key(p, "delay", w), w + ".delay");
            if (pert.segment >= n) schema_fail(w + ".segment", "index out of range");
            if (pert.event == 0 || pert.event > s.events) schema_fail(w + ".event", "must lie in 1..events");
            if (pert.delay < 0.0) schema_fail(w + ".delay", "must be >= 0");
            s.perturbations.push_back(pert);
        }
    }
    return s;
}

}  // namespace

ConfigDocument parse_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigParseError("byte " + std::to_string(e.byte) + ": " + e.what());
    }
    allow_keys(root, {"schema_version", "line", "demand", "control", "simulation"}, "config");

    ConfigDocument doc;
    const auto& version = require_key(root, "schema_version", "config");
    if (!version.is_number_integer() || version.get<long long>() != kSchemaVersion)
        schema_fail("config.schema_version", "unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
    doc.schema_version = kSchemaVersion;

    const auto& line = require_key(root, "line", "config");
    allow_keys(line, {"segments", "trains", "occupancy", "initial_departures"}, "line");
    const auto& segs = expect_array(require_key(line, "segments", "line"), "line.segments");
    if (segs.empty()) schema_fail("line.segments", "must not be empty");
    for (std::size_t j = 0; j < segs.size(); ++j)
        doc.line.segments.push_back(parse_segment(segs[j], "line.segments[" + std::to_string(j) + "]"));
    const auto n = doc.line.size();
    doc.line.trains = as_count(require_key(line, "trains", "line"), "line.trains");
    if (auto it = line.find("occupancy"); it != line.end()) {
        expect_array(*it, "line.occupancy");
        if (it->size() != n) schema_fail("line.occupancy", "expected one entry per segment");
        for (std::size_t j = 0; j < n; ++j) {
            const auto b = as_count((*it)[j], "line.occupancy[" + std::to_string(j) + "]");
            if (b > 1) schema_fail("line.occupancy[" + std::to_string(j) + "]", "must be 0 or 1");
            doc.line.occupancy.push_back(static_cast<std::uint8_t>(b));
        }
    }
    if (auto it = line.find("initial_departures"); it != line.end()) {
        doc.line.initial_departures = number_array(*it, "line.initial_departures");
        if (doc.line.initial_departures.size() != n) schema_fail("line.initial_departures", "expected one entry per segment");
    }

    doc.demand = parse_demand(require_key(root, "demand", "config"), n);
    if (auto it = root.find("control"); it != root.end()) doc.control = parse_control(*it, n);
    if (auto it = root.find("simulation"); it != root.end()) doc.simulation = parse_simulation(*it, n);

    // Model validity.
    if (doc.line.occupancy.empty()) doc.line.occupancy = even_occupancy(n, doc.line.trains);
    apply_demand(doc.line, doc.demand);
    validate(doc.line);
    derive_params(doc.line);
    validate_law(doc.line, doc.control);
    return doc;
}

ConfigDocument load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot read config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ConfigDocument& doc) {
    ordered_json root;
    root["schema_version"] = doc.schema_version;

    ordered_json line;
    ordered_json segs = ordered_json::array();
    for (const auto& s : doc.line.segments) {
        ordered_json seg;
        seg["platform"] = s.is_platform;
        seg["r_min"] = s.r_min;
        seg["r_nom"] = s.r_nom;
        seg["s_min"] = s.s_min;
        seg["g_min"] = s.g_min;
        seg["g_max"] = s.g_max;
        seg["alpha_in"] = s.alpha_in;
        seg["alpha_out"] = s.alpha_out;
        segs.push_back(std::move(seg));
    }
    line["segments"] = std::move(segs);
    line["trains"] = doc.line.trains;
    ordered_json occ = ordered_json::array();
    for (auto b : doc.line.occupancy) occ.push_back(static_cast<int>(b));
    line["occupancy"] = std::move(occ);
    if (!doc.line.initial_departures.empty()) line["initial_departures"] = doc.line.initial_departures;
    root["line"] = std::move(line);

    ordered_json demand;
    if (doc.demand.od) {
        ordered_json rows = ordered_json::array();
        const auto& dm = *doc.demand.od;
        for (std::size_t i = 0; i < dm.n; ++i) {
            ordered_json row = ordered_json::array();
            for (std::size_t j = 0; j < dm.n; ++j) row.push_back(dm(i, j));
            rows.push_back(std::move(row));
        }
        demand["od"] = std::move(rows);
    } else if (doc.demand.per_segment) {
        ordered_json per = ordered_json::array();
        for (const auto& d : *doc.demand.per_segment) {
            ordered_json item;
            item["lambda_in"] = d.lambda_in;
            item["lambda_out"] = d.lambda_out;
            per.push_back(std::move(item));
        }
        demand["per_segment"] = std::move(per);
    }
    root["demand"] = std::move(demand);

    ordered_json control;
    control["law"] = std::string(to_string(doc.control.mode));
    if (!doc.control.theta.empty()) control["theta"] = doc.control.theta;
    root["control"] = std::move(control);

    ordered_json sim;
    sim["events"] = doc.simulation.events;
    if (doc.simulation.warmup) sim["warmup"] = *doc.simulation.warmup;
    if (doc.simulation.window) sim["window"] = *doc.simulation.window;
    ordered_json perts = ordered_json::array();
    for (const auto& p : doc.simulation.perturbations) {
        ordered_json item;
        item["segment"] = p.segment;
        item["event"] = p.event;
        item["delay"] = p.delay;
        perts.push_back(std::move(item));
    }
    sim["perturbations"] = std::move(perts);
    root["simulation"] = std::move(sim);

    return root.dump(2) + "\n";
}

ConfigDocument make_document(const LineConfig& line, ControlLaw control, SimulationSettings simulation) {
    ConfigDocument doc;
    doc.line = line;
    std::vector<StationDemand> per;
    for (const auto& s : line.segments) per.push_back({s.lambda_in, s.lambda_out});
    doc.demand.per_segment = std::move(per);
    doc.control = std::move(control);
    doc.simulation = std::move(simulation);
    return doc;
}

}  // namespace metro
