#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "samgc/graph.hpp"
#include "samgc/layer.hpp"
#include "samgc/optim.hpp"
#include "samgc/tape.hpp"

namespace samgc {

// How the coarsened graph is produced: induced keeps the surviving edges of
// the input graph; knn_rebuild re-derives edges from the selected features
// (the dynamic-graph route used by the point-cloud pipeline).
enum class PoolGraphMode { induced, knn_rebuild };

// Score-based pooling: embed, score with a global softmax, rescale features
// by their scores, refine with an inner one-hop convolution, keep the top-w
// nodes.
struct PoolingParams {
    Parameter w_p;             // embedding weight [C x E]
    Parameter w_1;             // score weight [E x 1]
    std::unique_ptr<SamgcLayer> inner; // refinement layer on the embedded width
    double ratio = 0.5;        // used when fixed_w == 0
    std::uint32_t fixed_w = 0; // absolute node target; 0 defers to ratio
    PoolGraphMode mode = PoolGraphMode::induced;
    std::uint32_t rebuild_k = 8;
    double leak = 0.0;

    PoolingParams(std::uint32_t in_dim, std::uint32_t embed_dim, const SamgcLayerDims& inner_dims,
                  const std::string& name, Rng& init);

    std::uint32_t resolve_w(std::uint32_t n) const;
    void collect_parameters(std::vector<Parameter*>& out);
};

struct PoolingOutput {
    std::vector<std::uint32_t> selected; // ascending original node ids
    ValueId h_select;                    // [w x C_out], rows follow `selected`
    Graph pooled_graph;
    std::vector<double> scores; // length n, sums to 1
};

// Embedded features and the global softmax score per node ([n x 1]).
std::pair<ValueId, ValueId> score_nodes(Tape& tape, ValueId h, PoolingParams& params);

PoolingOutput pool(Tape& tape, ValueId h, const Graph& g, const HopSets& hops,
                   PoolingParams& params);

} // namespace samgc
