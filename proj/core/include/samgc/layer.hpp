#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "samgc/graph.hpp"
#include "samgc/graph_ops.hpp"
#include "samgc/optim.hpp"
#include "samgc/rng.hpp"
#include "samgc/structural.hpp"
#include "samgc/tape.hpp"

namespace samgc {

// The spatial-convolution variants: plain mean aggregation, structure-aware
// aggregation, neighbor-wise learnable average aggregation, and the full
// multi-hop form.
enum class Variant { graphsage, sagc, nwa_sagc, samgc };

Variant variant_from_string(const std::string& name);
std::string to_string(Variant v);

struct SamgcLayerDims {
    std::uint32_t in_dim = 0;   // C
    std::uint32_t out_dim = 0;  // width of the convolved features
    std::uint32_t re_dim = 16;  // relational embedding width
    std::uint32_t nw_dim = 16;  // neighbor-wise mixing width
    std::uint32_t hops = 2;     // t; hop sets beyond 1 only used by samgc
    double structural_leak = 0.01;
    double activation_leak = 0.0;
};

// Width of the stacked input the integration weight multiplies, per variant:
// the target row, the aggregated neighborhood blocks, and (samgc only) one
// in_dim block per hop in [2, hops].
std::uint32_t integrate_width(Variant variant, const SamgcLayerDims& dims);

// One spatial graph-convolution layer. Owns its weights; forward() records a
// fully differentiable pass on the tape.
class SamgcLayer {
public:
    SamgcLayer(Variant variant, const SamgcLayerDims& dims, const std::string& name, Rng& init);

    ValueId forward(Tape& tape, ValueId h, const Graph& g, const HopSets& hops);

    Variant variant() const { return variant_; }
    const SamgcLayerDims& dims() const { return dims_; }
    const StructuralParams& structural() const { return *structural_; }
    Parameter& integration_weight() { return w_; }

    void collect_parameters(std::vector<Parameter*>& out);

private:
    Variant variant_;
    SamgcLayerDims dims_;
    std::optional<StructuralParams> structural_; // all variants but graphsage
    std::optional<Parameter> w_nw_;              // nwa_sagc and samgc
    Parameter w_;
};

// --- per-node reference operations ------------------------------------------
//
// Definition-level implementations over plain vectors. They share no code
// with the batched tape path above and double as its test oracle.

// act(cat(h_u, fa, fd, re) * w_nw).
std::vector<double> neighbor_wise(std::span<const double> h_u, double fa_uv,
                                  std::span<const double> fd_uv, std::span<const double> re_uv,
                                  const Tensor& w_nw, double leak);

// Mean over neighbors of cat(h_u, fa, fd, re, nw); zero vector when the
// bundle is empty.
std::vector<double> one_hop_aggregate(const Tensor& h, const NeighborBundle& bundle,
                                      std::span<const std::vector<double>> nw_values,
                                      std::size_t nw_dim);

// cat of the exact-hop feature means for hops 2..t; empty when t == 1. A hop
// with no members contributes a zero block.
std::vector<double> multi_hop_aggregate(const Tensor& h, const HopSets& hops, std::uint32_t v,
                                        std::uint32_t t);

// act(cat(h_v, af, nh) * w).
std::vector<double> integrate_features(std::span<const double> h_v, std::span<const double> af,
                                       std::span<const double> nh, const Tensor& w, double leak);

} // namespace samgc
