#include "metro/event_graph.hpp"

#include <cmath>
#include <queue>

namespace metro {

EventGraph::EventGraph(std::size_t node_count, std::vector<EventEdge> edges)
    : node_count_(node_count), edges_(std::move(edges)), out_(node_count), in_(node_count) {
    if (node_count_ == 0) throw GraphError("event graph needs at least one node");
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const auto& edge = edges_[e];
        if (edge.from >= node_count_ || edge.to >= node_count_)
            throw GraphError("edge " + std::to_string(e) + " references a node out of range");
        if (!std::isfinite(edge.weight))
            throw GraphError("edge " + std::to_string(e) + " has a non-finite weight");
        out_[edge.from].push_back(e);
        in_[edge.to].push_back(e);
    }

    // Kahn's algorithm on the zero-shift subgraph.
    std::vector<std::size_t> indegree(node_count_, 0);
    for (const auto& edge : edges_)
        if (edge.shift == 0) ++indegree[edge.to];
    std::queue<std::size_t> ready;
    for (std::size_t v = 0; v < node_count_; ++v)
        if (indegree[v] == 0) ready.push(v);
    zero_order_.reserve(node_count_);
    while (!ready.empty()) {
        const auto v = ready.front();
        ready.pop();
        zero_order_.push_back(v);
        for (auto e : out_[v]) {
            if (edges_[e].shift != 0) continue;
            if (--indegree[edges_[e].to] == 0) ready.push(edges_[e].to);
        }
    }
    if (zero_order_.size() != node_count_)
        throw GraphError("zero-shift cycle: the event graph deadlocks");
}

namespace {

std::size_t reach_count(std::size_t n, const std::vector<std::vector<std::size_t>>& adj,
                        const std::vector<EventEdge>& edges, bool forward) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto e : adj[v]) {
            const auto w = forward ? edges[e].to : edges[e].from;
            if (!seen[w]) {
                seen[w] = true;
                ++count;
                stack.push_back(w);
            }
        }
    }
    return count;
}

}  // namespace

bool EventGraph::strongly_connected() const {
    return reach_count(node_count_, out_, edges_, true) == node_count_ &&
           reach_count(node_count_, in_, edges_, false) == node_count_;
}

EventGraph EventGraph::reversed() const {
    std::vector<EventEdge> rev;
    rev.reserve(edges_.size());
    for (const auto& e : edges_) rev.push_back({e.to, e.from, e.weight, e.shift});
    return EventGraph(node_count_, std::move(rev));
}

}  // namespace metro
