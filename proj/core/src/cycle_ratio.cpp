#include "metro/cycle_ratio.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace metro {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double weight_scale(const EventGraph& g) {
    double s = 1.0;
    for (const auto& e : g.edges()) s = std::max(s, std::abs(e.weight));
    return s;
}

struct PolicyCycle {
    double ratio;
    double weight;
    unsigned long shift;
    std::vector<std::size_t> nodes;
};

// Value determination for a fixed policy (one out-edge per node). The policy
// graph is functional, so every node leads into exactly one cycle.
std::vector<PolicyCycle> evaluate_policy(const EventGraph& g, const std::vector<std::size_t>& policy,
                                         std::vector<double>& ratio, std::vector<double>& bias) {
    const auto n = g.node_count();
    const auto& edges = g.edges();
    auto succ = [&](std::size_t v) { return edges[policy[v]].to; };

    std::vector<int> state(n, 0);  // 0 unvisited, 1 on current walk, 2 done
    std::vector<PolicyCycle> cycles;
    std::vector<std::size_t> path;

    for (std::size_t start = 0; start < n; ++start) {
        if (state[start] != 0) continue;
        path.clear();
        auto u = start;
        while (state[u] == 0) {
            state[u] = 1;
            path.push_back(u);
            u = succ(u);
        }
        if (state[u] == 1) {
            const auto idx = static_cast<std::size_t>(std::find(path.begin(), path.end(), u) - path.begin());
            PolicyCycle c{0.0, 0.0, 0, {}};
            for (auto p = idx; p < path.size(); ++p) {
                const auto& e = edges[policy[path[p]]];
                c.weight += e.weight;
                c.shift += e.shift;
                c.nodes.push_back(path[p]);
            }
            if (c.shift == 0) throw GraphError("zero-shift cycle: the event graph deadlocks");
            c.ratio = c.weight / static_cast<double>(c.shift);
            ratio[u] = c.ratio;
            bias[u] = 0.0;
            state[u] = 2;
            for (auto p = path.size() - 1; p > idx; --p) {
                const auto v = path[p];
                const auto& e = edges[policy[v]];
                ratio[v] = c.ratio;
                bias[v] = e.weight - c.ratio * e.shift + bias[e.to];
                state[v] = 2;
            }
            path.resize(idx);
            cycles.push_back(std::move(c));
        }
        for (auto p = path.size(); p-- > 0;) {
            const auto v = path[p];
            const auto& e = edges[policy[v]];
            ratio[v] = ratio[e.to];
            bias[v] = e.weight - ratio[v] * e.shift + bias[e.to];
            state[v] = 2;
        }
    }
    return cycles;
}

// Splits every edge with shift > 1 into a chain of unit-shift edges.
EventGraph unit_shift_expansion(const EventGraph& g) {
    std::size_t n = g.node_count();
    std::vector<EventEdge> out;
    for (const auto& e : g.edges()) {
        if (e.shift <= 1) {
            out.push_back(e);
            continue;
        }
        auto prev = e.from;
        double w = e.weight;
        for (unsigned s = 1; s < e.shift; ++s) {
            out.push_back({prev, n, w, 1});
            prev = n++;
            w = 0.0;
        }
        out.push_back({prev, e.to, 0.0, 1});
    }
    return EventGraph(n, std::move(out));
}

std::vector<std::vector<std::size_t>> strongly_connected_components(std::size_t n,
                                                                    const std::vector<std::vector<std::size_t>>& adj) {
    // Tarjan, recursive; graphs here are small.
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> comps;
    int counter = 0;
    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (auto w : adj[v]) {
            if (index[w] < 0) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<std::size_t> comp;
            std::size_t w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp.push_back(w);
            } while (w != v);
            comps.push_back(std::move(comp));
        }
    };
    for (std::size_t v = 0; v < n; ++v)
        if (index[v] < 0) visit(v);
    return comps;
}

}  // namespace

HowardResult howard_cycle_ratio(const EventGraph& g, const HowardOptions& opts) {
    const auto n = g.node_count();
    const auto& edges = g.edges();
    const auto& out = g.out_edges();
    for (std::size_t v = 0; v < n; ++v)
        if (out[v].empty()) throw GraphError("node " + std::to_string(v) + " has no outgoing edge");

    const double tol = opts.tolerance * weight_scale(g);

    std::vector<std::size_t> policy(n);
    for (std::size_t v = 0; v < n; ++v)
        policy[v] = *std::max_element(out[v].begin(), out[v].end(),
                                      [&](auto a, auto b) { return edges[a].weight < edges[b].weight; });

    HowardResult result;
    std::vector<double> ratio(n), bias(n);
    std::vector<PolicyCycle> cycles;

    for (result.iterations = 0; result.iterations < opts.max_iterations; ++result.iterations) {
        cycles = evaluate_policy(g, policy, ratio, bias);

        bool changed = false;
        for (std::size_t v = 0; v < n; ++v) {
            auto best = policy[v];
            double best_ratio = ratio[edges[best].to];
            for (auto e : out[v]) {
                if (ratio[edges[e].to] > best_ratio + tol) {
                    best = e;
                    best_ratio = ratio[edges[e].to];
                }
            }
            if (best != policy[v]) {
                policy[v] = best;
                changed = true;
            }
        }
        if (changed) continue;

        for (std::size_t v = 0; v < n; ++v) {
            auto best = policy[v];
            double best_value = bias[v];
            for (auto e : out[v]) {
                const auto& edge = edges[e];
                if (std::abs(ratio[edge.to] - ratio[v]) > tol) continue;
                const double value = edge.weight - ratio[v] * edge.shift + bias[edge.to];
                if (value > best_value + tol) {
                    best = e;
                    best_value = value;
                }
            }
            if (best != policy[v]) {
                policy[v] = best;
                changed = true;
            }
        }
        if (!changed) {
            result.converged = true;
            break;
        }
    }

    if (!cycles.empty()) {
        const auto crit = std::max_element(cycles.begin(), cycles.end(),
                                           [](const auto& a, const auto& b) { return a.ratio < b.ratio; });
        result.ratio.value = crit->ratio;
        result.ratio.weight = crit->weight;
        result.ratio.shift = crit->shift;
        result.ratio.cycle = crit->nodes;
        result.ratio.exact = true;
        result.ratio.method = RatioMethod::Howard;
    }
    result.bias = std::move(bias);
    return result;
}

TropicalMatrix one_step_matrix(const EventGraph& g) {
    const auto n = g.node_count();
    TropicalMatrix a0(n), a1(n);
    for (const auto& e : g.edges()) {
        if (e.shift > 1) throw GraphError("one_step_matrix: shifts must be 0 or 1");
        auto& target = e.shift == 0 ? a0 : a1;
        target(e.to, e.from) = target(e.to, e.from) + TropicalValue{e.weight};
    }
    // Zero-shift subgraph is acyclic (checked at construction) so the star converges.
    return mat_mul(a0.star(), a1);
}

double karp_cycle_ratio(const EventGraph& g) {
    const EventGraph unit = unit_shift_expansion(g);
    const TropicalMatrix m = one_step_matrix(unit);
    const auto n = m.dim();

    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (m(j, i).is_finite()) adj[i].push_back(j);

    double best = kNegInf;
    for (const auto& comp : strongly_connected_components(n, adj)) {
        if (comp.size() == 1 && m(comp[0], comp[0]).is_epsilon()) continue;
        const auto size = comp.size();
        std::vector<std::size_t> local(n, size);
        for (std::size_t i = 0; i < size; ++i) local[comp[i]] = i;

        // D[k][v]: heaviest walk of exactly k steps from comp[0] to v inside the component.
        std::vector<std::vector<double>> walk(size + 1, std::vector<double>(size, kNegInf));
        walk[0][0] = 0.0;
        for (std::size_t k = 1; k <= size; ++k)
            for (std::size_t i = 0; i < size; ++i) {
                if (walk[k - 1][i] == kNegInf) continue;
                for (std::size_t j = 0; j < size; ++j) {
                    const auto& w = m(comp[j], comp[i]);
                    if (w.is_finite()) walk[k][j] = std::max(walk[k][j], walk[k - 1][i] + w.value());
                }
            }
        for (std::size_t v = 0; v < size; ++v) {
            if (walk[size][v] == kNegInf) continue;
            double worst = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < size; ++k) {
                if (walk[k][v] == kNegInf) continue;
                worst = std::min(worst, (walk[size][v] - walk[k][v]) / static_cast<double>(size - k));
            }
            best = std::max(best, worst);
        }
    }
    if (best == kNegInf) throw GraphError("no cycles");
    return best;
}

CycleRatio growth_rate(const EventGraph& g, const HowardOptions& opts) {
    if (!g.strongly_connected()) throw GraphError("event graph is not strongly connected");
    auto howard = howard_cycle_ratio(g, opts);
    if (howard.converged) return std::move(howard.ratio);

    CycleRatio r;
    r.value = karp_cycle_ratio(g);
    r.exact = false;
    r.method = RatioMethod::Karp;
    return r;
}

std::vector<double> enumerate_cycle_ratios(const EventGraph& g, std::size_t max_len, std::size_t max_nodes) {
    const auto n = g.node_count();
    if (n > max_nodes)
        throw GraphError("graph too large for enumeration (" + std::to_string(n) + " > " +
                         std::to_string(max_nodes) + " nodes)");
    const auto& edges = g.edges();
    const auto& out = g.out_edges();

    std::vector<double> ratios;
    std::vector<bool> on_path(n, false);

    // Each simple cycle is reported once, rooted at its smallest node.
    std::function<void(std::size_t, std::size_t, double, unsigned long, std::size_t)> walk =
        [&](std::size_t root, std::size_t v, double weight, unsigned long shift, std::size_t depth) {
            for (auto e : out[v]) {
                const auto& edge = edges[e];
                const double w = weight + edge.weight;
                const unsigned long s = shift + edge.shift;
                if (edge.to == root) {
                    if (s == 0) throw GraphError("zero-shift cycle: the event graph deadlocks");
                    ratios.push_back(w / static_cast<double>(s));
                } else if (edge.to > root && !on_path[edge.to] && depth + 1 < max_len) {
                    on_path[edge.to] = true;
                    walk(root, edge.to, w, s, depth + 1);
                    on_path[edge.to] = false;
                }
            }
        };

    if (max_len > 0) {
        for (std::size_t root = 0; root < n; ++root) {
            on_path[root] = true;
            walk(root, root, 0.0, 0, 0);
            on_path[root] = false;
        }
    }
    if (ratios.empty()) throw GraphError("no cycles");
    return ratios;
}

std::vector<double> eigenvector(const EventGraph& g) {
    if (!g.strongly_connected()) throw GraphError("event graph is not strongly connected");
    // Out-edge bias on the reversed graph is the in-edge potential of g.
    auto howard = howard_cycle_ratio(g.reversed());
    if (!howard.converged) throw std::runtime_error("eigenvector: policy iteration did not converge");
    auto v = std::move(howard.bias);
    const double lo = *std::min_element(v.begin(), v.end());
    for (auto& x : v) x -= lo;
    return v;
}

}  // namespace metro
