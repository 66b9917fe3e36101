#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "samgc/index_view.hpp"
#include "samgc/tensor.hpp"

namespace samgc {

// Immutable undirected graph in compressed sparse row form. Adjacency is
// symmetric, self-loop free, duplicate free, and sorted ascending per node;
// from_edges() enforces all of that regardless of its input.
struct Graph {
    std::uint32_t n = 0;
    std::vector<std::uint32_t> row_offsets; // n + 1
    std::vector<std::uint32_t> targets;

    static Graph from_edges(std::uint32_t n,
                            std::span<const std::pair<std::uint32_t, std::uint32_t>> edges);

    std::span<const std::uint32_t> neighbors(std::uint32_t v) const {
        return {targets.data() + row_offsets[v], row_offsets[v + 1] - row_offsets[v]};
    }

    std::uint32_t degree(std::uint32_t v) const { return row_offsets[v + 1] - row_offsets[v]; }
    std::size_t undirected_edge_count() const { return targets.size() / 2; }
    IndexView view() const { return IndexView{row_offsets, targets}; }
};

// Exact-distance neighborhoods: hop i of node v holds the nodes at shortest
// path distance exactly i, sorted ascending. Hop 1 equals the adjacency.
class HopSets {
public:
    HopSets(std::uint32_t n, std::uint32_t t);

    std::uint32_t max_hop() const { return t_; }
    std::uint32_t node_count() const { return n_; }

    // i in [1, max_hop()]
    IndexView hop(std::uint32_t i) const {
        return IndexView{offsets_[i - 1], items_[i - 1]};
    }

    std::span<const std::uint32_t> nodes_at(std::uint32_t v, std::uint32_t i) const {
        return hop(i).at(v);
    }

private:
    friend HopSets exact_hop_sets(const Graph& g, std::uint32_t t);
    std::uint32_t n_ = 0;
    std::uint32_t t_ = 0;
    std::vector<std::vector<std::uint32_t>> offsets_; // per hop, n + 1
    std::vector<std::vector<std::uint32_t>> items_;
};

// k-nearest-neighbor graph over feature rows (Euclidean metric, ties broken
// by lower row index), symmetrized by union. Requires n > k >= 1.
Graph build_knn_graph(const Tensor& features, std::uint32_t k);

// Frontier-expansion extraction of all exact-distance hop sets up to t.
HopSets exact_hop_sets(const Graph& g, std::uint32_t t);

// Reference implementation: textbook queue-based breadth-first search from v,
// independent of exact_hop_sets. Returns the hop-1..hop-t lists.
std::vector<std::vector<std::uint32_t>> bfs_oracle(const Graph& g, std::uint32_t v,
                                                   std::uint32_t t);

// Subgraph on `keep` (strictly increasing node ids), renumbered 0..|keep|-1.
Graph induced_subgraph(const Graph& g, std::span<const std::uint32_t> keep);

} // namespace samgc
