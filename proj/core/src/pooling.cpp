#include "samgc/pooling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "samgc/error.hpp"

namespace samgc {

PoolingParams::PoolingParams(std::uint32_t in_dim, std::uint32_t embed_dim,
                             const SamgcLayerDims& inner_dims, const std::string& name,
                             Rng& init)
    : w_p(name + ".w_p", glorot_init(in_dim, embed_dim, init.next_u64())),
      w_1(name + ".w_1", glorot_init(embed_dim, 1, init.next_u64())) {
    if (inner_dims.in_dim != embed_dim) {
        throw ConfigError("pooling inner layer must consume the embedded width");
    }
    inner = std::make_unique<SamgcLayer>(Variant::samgc, inner_dims, name + ".inner", init);
}

std::uint32_t PoolingParams::resolve_w(std::uint32_t n) const {
    if (fixed_w > 0) {
        if (fixed_w > n) {
            throw ConfigError("pooling target " + std::to_string(fixed_w) + " exceeds " +
                              std::to_string(n) + " nodes");
        }
        return fixed_w;
    }
    if (ratio <= 0.0 || ratio > 1.0) {
        throw ConfigError("pooling ratio must lie in (0, 1], got " + std::to_string(ratio));
    }
    const double scaled = std::ceil(ratio * static_cast<double>(n));
    return std::max<std::uint32_t>(1, static_cast<std::uint32_t>(scaled));
}

void PoolingParams::collect_parameters(std::vector<Parameter*>& out) {
    out.push_back(&w_p);
    out.push_back(&w_1);
    inner->collect_parameters(out);
}

std::pair<ValueId, ValueId> score_nodes(Tape& tape, ValueId h, PoolingParams& params) {
    ValueId w_p = tape.external(params.w_p.value);
    ValueId w_1 = tape.external(params.w_1.value);
    ValueId embedded = tape.relu(tape.matmul(h, w_p), params.leak);
    ValueId raw = tape.matmul(embedded, w_1);   // [n x 1]
    ValueId scores = tape.col_softmax(raw);     // global softmax over nodes
    return {embedded, scores};
}

PoolingOutput pool(Tape& tape, ValueId h, const Graph& g, const HopSets& hops,
                   PoolingParams& params) {
    const std::uint32_t n = g.n;
    if (tape.value(h).rows != n) {
        throw ShapeError("pool: feature rows do not match node count");
    }
    const std::uint32_t w = params.resolve_w(n);

    auto [embedded, scores] = score_nodes(tape, h, params);
    ValueId rescaled = tape.row_scale(embedded, scores);
    ValueId refined = params.inner->forward(tape, rescaled, g, hops);

    // Rank by score descending, ties to the lower node id, then keep the top
    // w in ascending id order.
    const Tensor& sv = tape.value(scores);
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (sv.data[a] != sv.data[b]) {
            return sv.data[a] > sv.data[b];
        }
        return a < b;
    });
    std::vector<std::uint32_t> selected(order.begin(), order.begin() + w);
    std::sort(selected.begin(), selected.end());

    PoolingOutput out;
    out.selected = std::move(selected);
    out.h_select = tape.gather_rows(refined, out.selected);
    out.scores = sv.data;
    if (params.mode == PoolGraphMode::induced) {
        out.pooled_graph = induced_subgraph(g, out.selected);
    } else {
        out.pooled_graph = build_knn_graph(tape.value(out.h_select), params.rebuild_k);
    }
    return out;
}

} // namespace samgc
