#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "metro/analytics.hpp"
#include "metro/config.hpp"
#include "metro/csv.hpp"
#include "metro/cycle_ratio.hpp"
#include "metro/dynamics.hpp"
#include "metro/verify.hpp"

namespace metro::cli {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MismatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string resolve_config(const std::string& given) {
    if (!given.empty()) return given;
    if (const char* env = std::getenv(kConfigEnvVar); env && *env) return env;
    throw UsageError(std::string("no config file given (pass a path or set ") + kConfigEnvVar + ")");
}

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + path + "'");
    return f;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

double to_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw UsageError(what + ": '" + s + "' is not a number");
    return v;
}

std::size_t to_count(const std::string& s, const std::string& what) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw UsageError(what + ": '" + s + "' is not a non-negative integer");
    return std::stoul(s);
}

Perturbation parse_perturbation(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError("--perturb expects segment:event:delay, got '" + text + "'");
    return {to_count(parts[0], "--perturb segment"), to_count(parts[1], "--perturb event"),
            to_double(parts[2], "--perturb delay")};
}

std::vector<std::size_t> parse_m_range(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 2) throw UsageError("--m-range expects FIRST:LAST, got '" + text + "'");
    const auto lo = to_count(parts[0], "--m-range");
    const auto hi = to_count(parts[1], "--m-range");
    if (lo > hi) throw UsageError("--m-range '" + text + "' is empty");
    std::vector<std::size_t> out;
    for (auto m = lo; m <= hi; ++m) out.push_back(m);
    return out;
}

// "a,b,c" or "START:STEP:COUNT".
std::vector<double> parse_scales(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) throw UsageError("--demand-scales expects START:STEP:COUNT or a comma list");
        const double start = to_double(parts[0], "--demand-scales");
        const double step = to_double(parts[1], "--demand-scales");
        const auto count = to_count(parts[2], "--demand-scales");
        for (std::size_t i = 0; i < count; ++i) out.push_back(start + step * static_cast<double>(i));
    } else {
        for (const auto& p : split(text, ',')) out.push_back(to_double(p, "--demand-scales"));
    }
    if (out.empty()) throw UsageError("--demand-scales is empty");
    return out;
}

void set_trains(LineConfig& line, std::size_t m) {
    line.trains = m;
    line.occupancy = even_occupancy(line.size(), m);
    line.initial_departures.clear();
    validate(line);
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
    std::string config;
    std::optional<std::size_t> trains;
    std::string csv;
};

int analyze(const AnalyzeArgs& a, std::ostream& out) {
    auto doc = load_config(resolve_config(a.config));
    if (a.trains) set_trains(doc.line, *a.trains);
    const auto& cfg = doc.line;
    const auto dp = derive_params(cfg);
    const auto r = headway_formula(cfg, dp);
    const auto level = demand_level(cfg, dp);
    const auto report = check_linearity_conditions(cfg, dp);

    out << "segments            " << cfg.size() << '\n'
        << "trains              " << cfg.trains << '\n'
        << "x_mean              " << format_number(level.x_mean) << '\n'
        << "X_mean              " << format_number(level.X_mean) << '\n'
        << "headway_s           " << format_number(r.headway) << '\n'
        << "frequency_hz        " << format_number(r.frequency) << '\n'
        << "phase               " << to_string(r.phase) << '\n'
        << "term_free_flow      " << format_number(r.terms[0]) << '\n'
        << "term_max_frequency  " << format_number(r.terms[1]) << '\n'
        << "term_congested      " << format_number(r.terms[2]) << '\n'
        << "linearity           " << (report.holds ? "holds" : "violated") << '\n';
    for (std::size_t j = 0; j < report.segments.size(); ++j) {
        const auto& s = report.segments[j];
        out << "  segment " << j << ": h1=" << format_number(s.first_headway) << " h_max=" << format_number(s.h_max)
            << (s.headway_ok ? " ok" : " EXCEEDED") << "  dr=" << format_number(s.run_margin)
            << " X*dg=" << format_number(s.dwell_margin) << (s.margin_ok ? " ok" : " SHORT") << '\n';
    }
    if (!report.uniform_headway_ok) out << "  max h1 exceeds min h_max\n";

    if (!a.csv.empty()) {
        auto f = open_output(a.csv);
        f << "m,x_mean,X_mean,headway_s,frequency_hz,phase,term1,term2,term3,linearity_holds\n"
          << cfg.trains << ',' << format_number(level.x_mean) << ',' << format_number(level.X_mean) << ','
          << format_number(r.headway) << ',' << format_number(r.frequency) << ',' << to_string(r.phase) << ','
          << format_number(r.terms[0]) << ',' << format_number(r.terms[1]) << ',' << format_number(r.terms[2])
          << ',' << (report.holds ? 1 : 0) << '\n';
    }
    return kOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string config;
    std::optional<std::size_t> events;
    std::optional<std::size_t> window;
    std::optional<std::size_t> trains;
    std::string law;
    std::vector<std::string> perturb;
    std::string out;
};

int simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    auto doc = load_config(resolve_config(a.config));
    if (a.trains) set_trains(doc.line, *a.trains);
    if (!a.law.empty()) {
        ControlMode mode;
        try {
            mode = parse_control_mode(a.law);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        if (mode != doc.control.mode) {
            if (mode == ControlMode::BaselineTheta && doc.control.theta.empty())
                throw UsageError("--law baseline-theta needs control.theta in the config");
            doc.control.mode = mode;
            if (mode != ControlMode::BaselineTheta) doc.control.theta.clear();
        }
    }
    const auto& cfg = doc.line;
    const auto events = a.events.value_or(doc.simulation.events);
    if (events < 2) throw UsageError("--events must be at least 2");
    auto perturbations = doc.simulation.perturbations;
    for (const auto& p : a.perturb) perturbations.push_back(parse_perturbation(p));
    for (const auto& p : perturbations)
        if (p.segment >= cfg.size() || p.event == 0 || p.event > events || p.delay < 0.0)
            throw UsageError("perturbation out of range (segment < n, 1 <= event <= K, delay >= 0)");

    const auto dp = derive_params(cfg);
    const LineDynamics dyn(cfg, dp, doc.control);
    const auto log = dyn.simulate(events, perturbations);
    const auto window = a.window ? *a.window : doc.simulation.window.value_or(default_window(cfg, events));
    HeadwayEstimate est;
    try {
        est = asymptotic_headway(log, window);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    double final_max_headway = 0.0;
    for (std::size_t j = 0; j < cfg.size(); ++j) final_max_headway = std::max(final_max_headway, log.headway(events, j));

    std::ostream* summary = &out;
    std::ofstream file;
    if (a.out.empty()) {
        write_trajectory_csv(out, log);
        summary = &err;
    } else {
        file = open_output(a.out);
        write_trajectory_csv(file, log);
    }

    auto& s = *summary;
    s << "law                 " << to_string(doc.control.mode) << '\n'
      << "events              " << events << '\n'
      << "window              " << est.window << '\n'
      << "headway_s           " << format_number(est.headway) << '\n'
      << "half_window_s       " << format_number(est.half_window) << '\n'
      << "convergence_delta   " << format_number(est.delta) << '\n'
      << "converged           " << (est.converged ? "yes" : "no") << '\n'
      << "final_max_headway_s " << format_number(final_max_headway) << '\n';
    if (!perturbations.empty()) {
        const auto nominal = dyn.simulate(events);
        double max_dev = 0.0;
        double final_headway_dev = 0.0;
        for (std::size_t k = 1; k <= events; ++k)
            for (std::size_t j = 0; j < cfg.size(); ++j)
                max_dev = std::max(max_dev, std::abs(log.departure(k, j) - nominal.departure(k, j)));
        for (std::size_t j = 0; j < cfg.size(); ++j)
            final_headway_dev = std::max(final_headway_dev, std::abs(log.headway(events, j) - nominal.headway(events, j)));
        s << "max_deviation_s     " << format_number(max_dev) << '\n'
          << "final_headway_dev_s " << format_number(final_headway_dev) << '\n';
    }

    const bool linear_law = doc.control.mode == ControlMode::Linearized || doc.control.mode == ControlMode::FullControl;
    if (!est.converged && linear_law && check_linearity_conditions(cfg, dp).holds)
        throw MismatchError("simulation did not converge although the linearity conditions hold");
    return kOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    std::string config;
    std::string m_range;
    std::string scales = "1";
    std::string out;
};

int sweep_cmd(const SweepArgs& a, std::ostream& out, std::ostream& err) {
    const auto doc = load_config(resolve_config(a.config));
    const auto m_values =
        a.m_range.empty() ? parse_m_range("1:" + std::to_string(doc.line.size() - 1)) : parse_m_range(a.m_range);
    const auto scales = parse_scales(a.scales);
    const auto grid = sweep(doc.line, m_values, scales);

    std::ostream* summary = &out;
    std::ofstream file;
    if (a.out.empty()) {
        write_sweep_csv(out, grid);
        summary = &err;
    } else {
        file = open_output(a.out);
        write_sweep_csv(file, grid);
    }
    std::map<std::string, std::size_t> counts{{"FREE_FLOW", 0}, {"MAX_FREQUENCY", 0}, {"CONGESTED", 0}, {"INVALID", 0}};
    for (const auto& c : grid.cells) ++counts[c.valid ? std::string(to_string(c.result.phase)) : "INVALID"];
    *summary << "cells=" << grid.cells.size() << " FREE_FLOW=" << counts["FREE_FLOW"]
             << " MAX_FREQUENCY=" << counts["MAX_FREQUENCY"] << " CONGESTED=" << counts["CONGESTED"]
             << " INVALID=" << counts["INVALID"] << '\n';
    return kOk;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
    std::size_t trials = 50;
    std::uint64_t seed = 7;
    std::string csv;
    bool inject_fault = false;
};

int verify_cmd(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
    if (a.trials == 0) throw UsageError("--trials must be positive");
    VerifyOptions opts;
    opts.trials = a.trials;
    opts.seed = a.seed;
    if (a.inject_fault) {
        opts.formula = [](const LineConfig& cfg, const DerivedParams& dp) {
            auto r = headway_formula(cfg, dp);
            r.headway += 1e-3;
            return r;
        };
    }
    const auto report = verify(opts);
    if (!a.csv.empty()) {
        auto f = open_output(a.csv);
        write_verify_csv(f, report);
    }
    out << report.agreed << '/' << report.trials.size() << " agree\n";
    if (report.all_agree()) return kOk;

    for (const auto& t : report.trials) {
        if (t.agree) continue;
        err << "trial " << t.index << ": formula=" << format_number(t.formula) << " graph=" << format_number(t.graph)
            << " simulated=" << format_number(t.simulated) << " rel_error=" << format_number(t.max_rel_error) << '\n'
            << serialize_config(make_document(t.cfg, ControlLaw::linearized()));
    }
    throw MismatchError(std::to_string(report.trials.size() - report.agreed) + " of " +
                        std::to_string(report.trials.size()) + " trials disagree");
}

int report_error(std::ostream& err, const char* reason, const std::string& detail, int code) {
    std::string line = detail;
    for (auto& c : line)
        if (c == '\n') c = ' ';
    err << reason << ": " << line << '\n';
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Max-plus metro line analysis: closed-form headways, event simulation, phase sweeps"};
    app.name(args.empty() ? "metro" : args.front());
    app.require_subcommand(1);

    AnalyzeArgs aa;
    auto* analyze_cmd = app.add_subcommand("analyze", "Closed-form headway, frequency, phase and linearity report");
    analyze_cmd->add_option("config", aa.config, "Config JSON (default $METRO_CONFIG)");
    analyze_cmd->add_option("--trains", aa.trains, "Override the train count (trains spread evenly)");
    analyze_cmd->add_option("--csv", aa.csv, "Write a one-row CSV summary");

    SimulateArgs sa;
    auto* simulate_cmd = app.add_subcommand("simulate", "Event simulation; writes the trajectory CSV");
    simulate_cmd->add_option("config", sa.config, "Config JSON (default $METRO_CONFIG)");
    simulate_cmd->add_option("--events,-K", sa.events, "Number of events K");
    simulate_cmd->add_option("--window", sa.window, "Estimation window (even, <= K/2)");
    simulate_cmd->add_option("--trains", sa.trains, "Override the train count (trains spread evenly)");
    simulate_cmd->add_option("--law", sa.law, "linearized | full | baseline-upload | baseline-theta");
    simulate_cmd->add_option("--perturb", sa.perturb, "Delay injection segment:event:delay (repeatable)");
    simulate_cmd->add_option("--out", sa.out, "Trajectory CSV path (default stdout)");

    SweepArgs wa;
    auto* sweep_sub = app.add_subcommand("sweep", "Headway/phase grid over train counts and demand scales");
    sweep_sub->add_option("config", wa.config, "Config JSON (default $METRO_CONFIG)");
    sweep_sub->add_option("--m-range", wa.m_range, "FIRST:LAST train counts (default 1:n-1)");
    sweep_sub->add_option("--demand-scales", wa.scales, "Comma list or START:STEP:COUNT (default 1)");
    sweep_sub->add_option("--out", wa.out, "Grid CSV path (default stdout)");

    VerifyArgs va;
    auto* verify_sub = app.add_subcommand("verify", "Formula vs growth rate vs simulation on random instances");
    verify_sub->add_option("--trials", va.trials, "Number of random instances");
    verify_sub->add_option("--seed", va.seed, "Random seed");
    verify_sub->add_option("--csv", va.csv, "Per-trial CSV path");
    verify_sub->add_flag("--inject-fault", va.inject_fault)->group("");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        if (!reversed.empty()) reversed.pop_back();
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        return report_error(err, "usage-error", e.what(), kUsage);
    }

    try {
        if (*analyze_cmd) return analyze(aa, out);
        if (*simulate_cmd) return simulate(sa, out, err);
        if (*sweep_sub) return sweep_cmd(wa, out, err);
        if (*verify_sub) return verify_cmd(va, out, err);
        return report_error(err, "usage-error", "no subcommand", kUsage);
    } catch (const UsageError& e) {
        return report_error(err, "usage-error", e.what(), kUsage);
    } catch (const ConfigParseError& e) {
        return report_error(err, "parse-error", e.what(), kSchema);
    } catch (const SchemaError& e) {
        return report_error(err, "schema-error", e.what(), kSchema);
    } catch (const ModelError& e) {
        return report_error(err, "model-error", e.what(), kModel);
    } catch (const GraphError& e) {
        return report_error(err, "model-error", e.what(), kModel);
    } catch (const DynamicsError& e) {
        return report_error(err, "model-error", e.what(), kModel);
    } catch (const MismatchError& e) {
        return report_error(err, "verification-mismatch", e.what(), kMismatch);
    }
}

}  // namespace metro::cli
