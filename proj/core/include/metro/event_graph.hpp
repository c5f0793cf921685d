#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace metro {

/// Raised for structurally invalid event graphs (zero-shift cycles, bad
/// indices, disconnected graphs where connectivity is required).
class GraphError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Precedence d^k[to] >= d^{k - shift}[from] + weight.
struct EventEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    double weight = 0.0;
    unsigned shift = 0;

    bool operator==(const EventEdge&) const = default;
};

/**
 * Timed event graph: one node per event family, edges carry a holding time
 * (seconds) and an event-count shift. Every directed cycle must carry a total
 * shift of at least one; the constructor rejects graphs with a zero-shift
 * cycle since those deadlock.
 */
class EventGraph {
public:
    EventGraph(std::size_t node_count, std::vector<EventEdge> edges);

    std::size_t node_count() const { return node_count_; }
    const std::vector<EventEdge>& edges() const { return edges_; }

    /// Indices into edges() leaving / entering each node.
    const std::vector<std::vector<std::size_t>>& out_edges() const { return out_; }
    const std::vector<std::vector<std::size_t>>& in_edges() const { return in_; }

    /// Order in which same-event values can be evaluated: every zero-shift
    /// edge goes from an earlier to a later node in this order.
    const std::vector<std::size_t>& zero_shift_order() const { return zero_order_; }

    bool strongly_connected() const;

    /// Same nodes, every edge reversed.
    EventGraph reversed() const;

private:
    std::size_t node_count_;
    std::vector<EventEdge> edges_;
    std::vector<std::vector<std::size_t>> out_;
    std::vector<std::vector<std::size_t>> in_;
    std::vector<std::size_t> zero_order_;
};

}  // namespace metro
