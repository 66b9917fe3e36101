#include "samgc/graph.hpp"

#include <algorithm>
#include <queue>
#include <string>

#include "samgc/error.hpp"

namespace samgc {

Graph Graph::from_edges(std::uint32_t n,
                        std::span<const std::pair<std::uint32_t, std::uint32_t>> edges) {
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (const auto& [a, b] : edges) {
        if (a >= n || b >= n) {
            throw DataError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                            ") out of range for n = " + std::to_string(n));
        }
        if (a == b) {
            continue;
        }
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    Graph g;
    g.n = n;
    g.row_offsets.assign(n + 1, 0);
    for (std::uint32_t v = 0; v < n; ++v) {
        auto& nb = adj[v];
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        g.row_offsets[v + 1] = g.row_offsets[v] + static_cast<std::uint32_t>(nb.size());
    }
    g.targets.reserve(g.row_offsets[n]);
    for (std::uint32_t v = 0; v < n; ++v) {
        g.targets.insert(g.targets.end(), adj[v].begin(), adj[v].end());
    }
    return g;
}

Graph build_knn_graph(const Tensor& features, std::uint32_t k) {
    const std::uint32_t n = static_cast<std::uint32_t>(features.rows);
    if (k < 1 || n <= k) {
        throw ConfigError("build_knn_graph: need n > k >= 1, got n = " + std::to_string(n) +
                          ", k = " + std::to_string(k));
    }
    const std::size_t d = features.cols;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    edges.reserve(static_cast<std::size_t>(n) * k);
    std::vector<std::pair<double, std::uint32_t>> dist(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        const double* fi = features.data.data() + static_cast<std::size_t>(i) * d;
        std::size_t count = 0;
        for (std::uint32_t j = 0; j < n; ++j) {
            if (j == i) {
                continue;
            }
            const double* fj = features.data.data() + static_cast<std::size_t>(j) * d;
            double acc = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = fi[c] - fj[c];
                acc += diff * diff;
            }
            dist[count++] = {acc, j};
        }
        std::partial_sort(dist.begin(), dist.begin() + k, dist.begin() + count);
        for (std::uint32_t r = 0; r < k; ++r) {
            edges.emplace_back(i, dist[r].second);
        }
    }
    return Graph::from_edges(n, edges);
}

HopSets::HopSets(std::uint32_t n, std::uint32_t t) : n_(n), t_(t) {
    offsets_.assign(t, std::vector<std::uint32_t>(n + 1, 0));
    items_.resize(t);
}

HopSets exact_hop_sets(const Graph& g, std::uint32_t t) {
    if (t < 1) {
        throw ConfigError("exact_hop_sets: hop count must be >= 1");
    }
    HopSets hs(g.n, t);
    // Frontier expansion per node; `seen` is a stamp array reused across
    // source nodes so each extraction is O(visited).
    constexpr std::uint32_t kUnseen = 0xffffffffu;
    std::vector<std::uint32_t> seen(g.n, kUnseen);
    std::vector<std::uint32_t> frontier, next;
    std::vector<std::vector<std::uint32_t>> per_hop(t);
    for (std::uint32_t v = 0; v < g.n; ++v) {
        seen[v] = v;
        frontier.assign(1, v);
        for (std::uint32_t hop = 1; hop <= t; ++hop) {
            next.clear();
            for (const std::uint32_t f : frontier) {
                for (const std::uint32_t u : g.neighbors(f)) {
                    if (seen[u] != v) {
                        seen[u] = v;
                        next.push_back(u);
                    }
                }
            }
            std::sort(next.begin(), next.end());
            per_hop[hop - 1] = next;
            frontier = next;
            if (frontier.empty()) {
                for (std::uint32_t rest = hop + 1; rest <= t; ++rest) {
                    per_hop[rest - 1].clear();
                }
                break;
            }
        }
        // Stamps are only valid within one source's expansion; reset by the
        // v-keyed stamp value, so nothing to clear here.
        for (std::uint32_t hop = 1; hop <= t; ++hop) {
            auto& items = hs.items_[hop - 1];
            items.insert(items.end(), per_hop[hop - 1].begin(), per_hop[hop - 1].end());
            hs.offsets_[hop - 1][v + 1] = static_cast<std::uint32_t>(items.size());
            per_hop[hop - 1].clear();
        }
    }
    return hs;
}

std::vector<std::vector<std::uint32_t>> bfs_oracle(const Graph& g, std::uint32_t v,
                                                   std::uint32_t t) {
    if (v >= g.n) {
        throw ContractError("bfs_oracle: node " + std::to_string(v) + " out of range");
    }
    constexpr std::uint32_t kInf = 0xffffffffu;
    std::vector<std::uint32_t> dist(g.n, kInf);
    std::queue<std::uint32_t> q;
    dist[v] = 0;
    q.push(v);
    while (!q.empty()) {
        const std::uint32_t x = q.front();
        q.pop();
        if (dist[x] >= t) {
            continue;
        }
        for (const std::uint32_t u : g.neighbors(x)) {
            if (dist[u] == kInf) {
                dist[u] = dist[x] + 1;
                q.push(u);
            }
        }
    }
    std::vector<std::vector<std::uint32_t>> hops(t);
    for (std::uint32_t u = 0; u < g.n; ++u) {
        if (dist[u] >= 1 && dist[u] <= t) {
            hops[dist[u] - 1].push_back(u);
        }
    }
    for (auto& h : hops) {
        std::sort(h.begin(), h.end());
    }
    return hops;
}

Graph induced_subgraph(const Graph& g, std::span<const std::uint32_t> keep) {
    if (keep.empty()) {
        throw ContractError("induced_subgraph: empty keep set");
    }
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] >= g.n) {
            throw ContractError("induced_subgraph: node " + std::to_string(keep[i]) +
                                " out of range");
        }
        if (i > 0 && keep[i] <= keep[i - 1]) {
            throw ContractError("induced_subgraph: keep set must be strictly increasing");
        }
    }
    constexpr std::uint32_t kDropped = 0xffffffffu;
    std::vector<std::uint32_t> remap(g.n, kDropped);
    for (std::size_t i = 0; i < keep.size(); ++i) {
        remap[keep[i]] = static_cast<std::uint32_t>(i);
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const std::uint32_t v : keep) {
        for (const std::uint32_t u : g.neighbors(v)) {
            if (u > v && remap[u] != kDropped) {
                edges.emplace_back(remap[v], remap[u]);
            }
        }
    }
    return Graph::from_edges(static_cast<std::uint32_t>(keep.size()), edges);
}

} // namespace samgc
