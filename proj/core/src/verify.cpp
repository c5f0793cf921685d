#include "metro/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "metro/csv.hpp"
#include "metro/cycle_ratio.hpp"
#include "metro/dynamics.hpp"

namespace metro {

namespace {

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

VerifyTrial verify_instance(const LineConfig& cfg, const VerifyOptions& opts) {
    VerifyTrial t;
    t.cfg = cfg;
    const auto dp = derive_params(cfg);
    t.formula = (opts.formula ? opts.formula(cfg, dp) : headway_formula(cfg, dp)).headway;
    t.graph = growth_rate(build_event_graph(cfg, dp)).value;

    const auto events = opts.events_per_segment * cfg.size();
    const auto log = LineDynamics(cfg, dp, ControlLaw::linearized()).simulate(events);
    const auto est = asymptotic_headway(log, default_window(cfg, events), opts.rel_tol);
    t.simulated = est.headway;
    t.simulation_converged = est.converged;

    t.max_rel_error = std::max({rel_diff(t.formula, t.graph), rel_diff(t.formula, t.simulated),
                                rel_diff(t.graph, t.simulated)});
    t.agree = t.max_rel_error <= opts.rel_tol;
    return t;
}

VerifyReport verify(const VerifyOptions& opts) {
    Rng rng(opts.seed);
    std::vector<LineConfig> instances;
    instances.reserve(opts.trials);
    for (std::size_t i = 0; i < opts.trials; ++i) instances.push_back(random_instance(rng, opts.instances));

    VerifyReport report;
    report.trials.resize(opts.trials);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (auto i = next++; i < instances.size(); i = next++) {
            report.trials[i] = verify_instance(instances[i], opts);
            report.trials[i].index = i;
        }
    };
    const auto threads = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    pool.clear();

    report.agreed = static_cast<std::size_t>(
        std::count_if(report.trials.begin(), report.trials.end(), [](const auto& t) { return t.agree; }));
    return report;
}

void write_verify_csv(std::ostream& out, const VerifyReport& report) {
    out << "trial,n,m,formula_s,graph_s,simulated_s,max_rel_error,agree\n";
    for (const auto& t : report.trials)
        out << t.index << ',' << t.cfg.size() << ',' << t.cfg.trains << ',' << format_number(t.formula) << ','
            << format_number(t.graph) << ',' << format_number(t.simulated) << ',' << format_number(t.max_rel_error)
            << ',' << (t.agree ? 1 : 0) << '\n';
}

}  // namespace metro
