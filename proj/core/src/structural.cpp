#include "samgc/structural.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "samgc/error.hpp"

namespace samgc {

namespace {

double act(double x, double leak) { return x > 0.0 ? x : leak * x; }

// row * w for a plain vector row.
std::vector<double> vec_matmul(std::span<const double> row, const Tensor& w) {
    if (row.size() != w.rows) {
        throw ShapeError("vector width " + std::to_string(row.size()) +
                         " does not match weight rows " + std::to_string(w.rows));
    }
    std::vector<double> out(w.cols, 0.0);
    for (std::size_t c = 0; c < w.rows; ++c) {
        const double v = row[c];
        if (v == 0.0) {
            continue;
        }
        const double* wrow = w.data.data() + c * w.cols;
        for (std::size_t j = 0; j < w.cols; ++j) {
            out[j] += v * wrow[j];
        }
    }
    return out;
}

} // namespace

std::vector<std::vector<double>> difference_vectors(const Tensor& h, const Graph& g,
                                                    std::uint32_t v) {
    if (v >= g.n) {
        throw ContractError("difference_vectors: node " + std::to_string(v) + " out of range");
    }
    const auto hv = h.row(v);
    std::vector<std::vector<double>> diffs;
    diffs.reserve(g.degree(v));
    for (const std::uint32_t u : g.neighbors(v)) {
        const auto hu = h.row(u);
        std::vector<double> d(h.cols);
        for (std::size_t j = 0; j < h.cols; ++j) {
            d[j] = hu[j] - hv[j];
        }
        diffs.push_back(std::move(d));
    }
    return diffs;
}

std::vector<double> base_vector(std::span<const std::vector<double>> diffs, const Tensor& w_gb,
                                double leak) {
    if (diffs.empty()) {
        throw ContractError("base_vector: no difference vectors (isolated node)");
    }
    std::vector<double> best;
    for (const auto& d : diffs) {
        std::vector<double> m = vec_matmul(d, w_gb);
        for (double& x : m) {
            x = act(x, leak);
        }
        if (best.empty()) {
            best = std::move(m);
        } else {
            for (std::size_t j = 0; j < best.size(); ++j) {
                best[j] = std::max(best[j], m[j]);
            }
        }
    }
    return best;
}

double feature_angle(std::span<const double> g_uv, std::span<const double> g_b) {
    if (g_uv.size() != g_b.size()) {
        throw ShapeError("feature_angle: lengths disagree");
    }
    double dot = 0.0, nu = 0.0, nb = 0.0;
    for (std::size_t j = 0; j < g_uv.size(); ++j) {
        dot += g_uv[j] * g_b[j];
        nu += g_uv[j] * g_uv[j];
        nb += g_b[j] * g_b[j];
    }
    const double a = std::sqrt(nu);
    const double b = std::sqrt(nb);
    if (a < 1e-12 || b < 1e-12) {
        return 0.0;
    }
    return dot / (a * b);
}

std::vector<double> feature_distance(std::span<const double> h_u, std::span<const double> h_v) {
    if (h_u.size() != h_v.size()) {
        throw ShapeError("feature_distance: lengths disagree: " + std::to_string(h_u.size()) +
                         " vs " + std::to_string(h_v.size()));
    }
    std::vector<double> out(h_u.size());
    for (std::size_t j = 0; j < h_u.size(); ++j) {
        out[j] = std::fabs(h_u[j] - h_v[j]);
    }
    return out;
}

std::vector<double> relational_embedding(std::span<const double> h_u,
                                         std::span<const double> h_v, const Tensor& w_re,
                                         double leak) {
    if (h_u.size() != h_v.size()) {
        throw ShapeError("relational_embedding: lengths disagree");
    }
    std::vector<double> diff(h_u.size());
    for (std::size_t j = 0; j < h_u.size(); ++j) {
        diff[j] = h_u[j] - h_v[j];
    }
    std::vector<double> out = vec_matmul(diff, w_re);
    for (double& x : out) {
        x = act(x, leak);
    }
    return out;
}

NeighborBundle compute_neighbor_bundle(const Tensor& h, const Graph& g, std::uint32_t v,
                                       const StructuralParams& params) {
    NeighborBundle b;
    const auto nbrs = g.neighbors(v);
    b.neighbors.assign(nbrs.begin(), nbrs.end());
    b.g_uv = difference_vectors(h, g, v);
    if (b.g_uv.empty()) {
        return b;
    }
    const std::vector<double> gb = base_vector(b.g_uv, params.w_gb.value, params.leak);
    b.fa_uv.reserve(b.neighbors.size());
    b.fd_uv.reserve(b.neighbors.size());
    b.re_uv.reserve(b.neighbors.size());
    for (std::size_t i = 0; i < b.neighbors.size(); ++i) {
        const std::uint32_t u = b.neighbors[i];
        b.fa_uv.push_back(feature_angle(b.g_uv[i], gb));
        b.fd_uv.push_back(feature_distance(h.row(u), h.row(v)));
        b.re_uv.push_back(relational_embedding(h.row(u), h.row(v), params.w_re.value, params.leak));
    }
    return b;
}

} // namespace samgc
