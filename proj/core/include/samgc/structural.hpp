#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "samgc/graph.hpp"
#include "samgc/optim.hpp"
#include "samgc/tensor.hpp"

namespace samgc {

// Weights of the two structural-feature MLPs: the base-vector MLP (square,
// so the feature angle's dot product is well formed) and the relational
// embedding MLP of width re_dim. Both use a leaky activation.
struct StructuralParams {
    Parameter w_gb; // [C x C]
    Parameter w_re; // [C x R]
    double leak = 0.01;

    std::size_t feature_dim() const { return w_gb.value.rows; }
    std::size_t re_dim() const { return w_re.value.cols; }
};

// Difference vectors h_u - h_v for the 1-hop neighbors of v, ascending u.
// Empty for an isolated node.
std::vector<std::vector<double>> difference_vectors(const Tensor& h, const Graph& g,
                                                    std::uint32_t v);

// Columnwise max over act(diff * w_gb); requires at least one difference
// vector (callers substitute a zero vector for isolated nodes).
std::vector<double> base_vector(std::span<const std::vector<double>> diffs, const Tensor& w_gb,
                                double leak);

// Cosine between a difference vector and the base vector; 0 when either norm
// falls below 1e-12.
double feature_angle(std::span<const double> g_uv, std::span<const double> g_b);

// Elementwise absolute difference.
std::vector<double> feature_distance(std::span<const double> h_u, std::span<const double> h_v);

// act((h_u - h_v) * w_re).
std::vector<double> relational_embedding(std::span<const double> h_u,
                                         std::span<const double> h_v, const Tensor& w_re,
                                         double leak);

// All structural features of the ordered pairs (u, v), u in the 1-hop
// neighborhood of v, ascending u.
struct NeighborBundle {
    std::vector<std::uint32_t> neighbors;
    std::vector<std::vector<double>> g_uv;
    std::vector<double> fa_uv;
    std::vector<std::vector<double>> fd_uv;
    std::vector<std::vector<double>> re_uv;
};

NeighborBundle compute_neighbor_bundle(const Tensor& h, const Graph& g, std::uint32_t v,
                                       const StructuralParams& params);

} // namespace samgc
