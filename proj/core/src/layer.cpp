#include "samgc/layer.hpp"

#include <string>

#include "samgc/error.hpp"

namespace samgc {

Variant variant_from_string(const std::string& name) {
    if (name == "graphsage") {
        return Variant::graphsage;
    }
    if (name == "sagc") {
        return Variant::sagc;
    }
    if (name == "nwa_sagc") {
        return Variant::nwa_sagc;
    }
    if (name == "samgc") {
        return Variant::samgc;
    }
    throw ConfigError("unknown variant '" + name +
                      "' (expected graphsage|sagc|nwa_sagc|samgc)");
}

std::string to_string(Variant v) {
    switch (v) {
    case Variant::graphsage:
        return "graphsage";
    case Variant::sagc:
        return "sagc";
    case Variant::nwa_sagc:
        return "nwa_sagc";
    case Variant::samgc:
        return "samgc";
    }
    return "?";
}

std::uint32_t integrate_width(Variant variant, const SamgcLayerDims& dims) {
    const std::uint32_t c = dims.in_dim;
    switch (variant) {
    case Variant::graphsage:
        return c + c;
    case Variant::sagc:
        return c + (2 * c + 1 + dims.re_dim);
    case Variant::nwa_sagc:
        return c + (2 * c + 1 + dims.re_dim + dims.nw_dim);
    case Variant::samgc:
        return c + (2 * c + 1 + dims.re_dim + dims.nw_dim) + c * (dims.hops - 1);
    }
    return 0;
}

SamgcLayer::SamgcLayer(Variant variant, const SamgcLayerDims& dims, const std::string& name,
                       Rng& init)
    : variant_(variant), dims_(dims) {
    if (dims.in_dim == 0 || dims.out_dim == 0) {
        throw ConfigError("layer dimensions must be positive");
    }
    if (dims.hops < 1) {
        throw ConfigError("layer hop count must be >= 1");
    }
    if (variant != Variant::graphsage) {
        StructuralParams sp{
            Parameter(name + ".w_gb", glorot_init(dims.in_dim, dims.in_dim, init.next_u64())),
            Parameter(name + ".w_re", glorot_init(dims.in_dim, dims.re_dim, init.next_u64())),
            dims.structural_leak};
        structural_.emplace(std::move(sp));
    }
    if (variant == Variant::nwa_sagc || variant == Variant::samgc) {
        const std::uint32_t nw_in = 2 * dims.in_dim + 1 + dims.re_dim;
        w_nw_.emplace(name + ".w_nw", glorot_init(nw_in, dims.nw_dim, init.next_u64()));
    }
    w_ = Parameter(name + ".w", glorot_init(integrate_width(variant, dims), dims.out_dim,
                                            init.next_u64()));
}

void SamgcLayer::collect_parameters(std::vector<Parameter*>& out) {
    if (structural_) {
        out.push_back(&structural_->w_gb);
        out.push_back(&structural_->w_re);
    }
    if (w_nw_) {
        out.push_back(&*w_nw_);
    }
    out.push_back(&w_);
}

ValueId SamgcLayer::forward(Tape& tape, ValueId h, const Graph& g, const HopSets& hops) {
    const std::uint32_t c = dims_.in_dim;
    const std::uint32_t r = dims_.re_dim;
    const std::uint32_t d_nw = dims_.nw_dim;
    {
        const Tensor& th = tape.value(h);
        if (th.cols != c) {
            throw ShapeError("layer expects " + std::to_string(c) + " input columns, got " +
                             std::to_string(th.cols));
        }
        if (th.rows != g.n) {
            throw ShapeError("feature rows " + std::to_string(th.rows) +
                             " do not match node count " + std::to_string(g.n));
        }
    }
    if (variant_ == Variant::samgc && hops.max_hop() < dims_.hops) {
        throw ConfigError("hop sets cover " + std::to_string(hops.max_hop()) +
                          " hops but the layer needs " + std::to_string(dims_.hops));
    }
    if (hops.node_count() != g.n) {
        throw ConfigError("hop sets were built for a different graph");
    }

    const IndexView adj = g.view();
    const std::size_t n = g.n;
    const bool has_edges = adj.total() > 0;

    // Aggregated blocks in integration order, alongside their widths.
    std::vector<ValueId> blocks;
    std::vector<std::uint32_t> widths;
    auto zero_block = [&](std::uint32_t width) {
        return tape.leaf(Tensor(n, width)); // constant zeros, no gradient
    };

    // Mean of raw neighbor features, used by every variant.
    blocks.push_back(segment_mean_rows(tape, h, adj));
    widths.push_back(c);

    if (variant_ != Variant::graphsage) {
        ValueId w_gb = tape.external(structural_->w_gb.value);
        ValueId w_re = tape.external(structural_->w_re.value);
        const double leak = structural_->leak;

        ValueId fa{};
        ValueId re{};
        if (has_edges) {
            // The structural MLPs are linear, so MLP(h_u - h_v) is assembled
            // from node-level products instead of per-pair ones.
            ValueId p = tape.matmul(h, w_gb);
            ValueId gb = pair_diff_act_segmax(tape, p, adj, leak);
            fa = pair_cosine_vs_base(tape, h, gb, adj); // [pairs x 1]
            ValueId q = tape.matmul(h, w_re);
            re = tape.relu(pair_diff_rows(tape, q, adj), leak); // [pairs x R]

            blocks.push_back(edge_mean_by_segment(tape, fa, adj));
            widths.push_back(1);
            blocks.push_back(neighbor_absdiff_mean(tape, h, adj));
            widths.push_back(c);
            blocks.push_back(edge_mean_by_segment(tape, re, adj));
            widths.push_back(r);
        } else {
            blocks.push_back(zero_block(1));
            widths.push_back(1);
            blocks.push_back(zero_block(c));
            widths.push_back(c);
            blocks.push_back(zero_block(r));
            widths.push_back(r);
        }

        if (variant_ == Variant::nwa_sagc || variant_ == Variant::samgc) {
            if (has_edges) {
                // nw = act(cat(h_u, fa, fd, re) * w_nw), with w_nw split into
                // its row blocks so the stacked pair features never exist.
                ValueId w_nw = tape.external(w_nw_->value);
                ValueId b_hu =
                    tape.gather_rows(tape.matmul(h, tape.slice_rows(w_nw, 0, c)), adj.items);
                ValueId b_fa = tape.matmul(fa, tape.slice_rows(w_nw, c, c + 1));
                ValueId b_fd =
                    pair_absdiff_matmul(tape, h, tape.slice_rows(w_nw, c + 1, 2 * c + 1), adj);
                ValueId b_re = tape.matmul(re, tape.slice_rows(w_nw, 2 * c + 1, 2 * c + 1 + r));
                ValueId nw = tape.relu(
                    tape.add(tape.add(b_hu, b_fa), tape.add(b_fd, b_re)), dims_.activation_leak);
                blocks.push_back(edge_mean_by_segment(tape, nw, adj));
            } else {
                blocks.push_back(zero_block(d_nw));
            }
            widths.push_back(d_nw);
        }
    }

    if (variant_ == Variant::samgc) {
        for (std::uint32_t i = 2; i <= dims_.hops; ++i) {
            blocks.push_back(segment_mean_rows(tape, h, hops.hop(i)));
            widths.push_back(c);
        }
    }

    // out = act(cat(h_v, blocks...) * w), evaluated block-by-block against
    // the matching row slices of w.
    ValueId w_all = tape.external(w_.value);
    ValueId acc = tape.matmul(h, tape.slice_rows(w_all, 0, c));
    std::size_t row0 = c;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        acc = tape.add(acc, tape.matmul(blocks[b], tape.slice_rows(w_all, row0, row0 + widths[b])));
        row0 += widths[b];
    }
    if (row0 != w_.value.rows) {
        throw ShapeError("integration weight has " + std::to_string(w_.value.rows) +
                         " rows but the stacked input is " + std::to_string(row0) + " wide");
    }
    return tape.relu(acc, dims_.activation_leak);
}

// --- per-node reference operations ------------------------------------------

namespace {

std::vector<double> act_vec_matmul(std::span<const double> row, const Tensor& w, double leak) {
    if (row.size() != w.rows) {
        throw ShapeError("stacked vector width " + std::to_string(row.size()) +
                         " does not match weight rows " + std::to_string(w.rows));
    }
    std::vector<double> out(w.cols, 0.0);
    for (std::size_t i = 0; i < w.rows; ++i) {
        const double v = row[i];
        if (v == 0.0) {
            continue;
        }
        const double* wrow = w.data.data() + i * w.cols;
        for (std::size_t j = 0; j < w.cols; ++j) {
            out[j] += v * wrow[j];
        }
    }
    for (double& x : out) {
        x = x > 0.0 ? x : leak * x;
    }
    return out;
}

} // namespace

std::vector<double> neighbor_wise(std::span<const double> h_u, double fa_uv,
                                  std::span<const double> fd_uv, std::span<const double> re_uv,
                                  const Tensor& w_nw, double leak) {
    std::vector<double> stacked;
    stacked.reserve(h_u.size() + 1 + fd_uv.size() + re_uv.size());
    stacked.insert(stacked.end(), h_u.begin(), h_u.end());
    stacked.push_back(fa_uv);
    stacked.insert(stacked.end(), fd_uv.begin(), fd_uv.end());
    stacked.insert(stacked.end(), re_uv.begin(), re_uv.end());
    return act_vec_matmul(stacked, w_nw, leak);
}

std::vector<double> one_hop_aggregate(const Tensor& h, const NeighborBundle& bundle,
                                      std::span<const std::vector<double>> nw_values,
                                      std::size_t nw_dim) {
    const std::size_t c = h.cols;
    const std::size_t r = bundle.re_uv.empty() ? 0 : bundle.re_uv[0].size();
    const std::size_t width = 2 * c + 1 + r + nw_dim;
    std::vector<double> af(width, 0.0);
    if (bundle.neighbors.empty()) {
        return af;
    }
    if (nw_values.size() != bundle.neighbors.size()) {
        throw ShapeError("one_hop_aggregate: one nw vector per neighbor required");
    }
    for (std::size_t i = 0; i < bundle.neighbors.size(); ++i) {
        const auto h_u = h.row(bundle.neighbors[i]);
        std::size_t o = 0;
        for (std::size_t j = 0; j < c; ++j) {
            af[o++] += h_u[j];
        }
        af[o++] += bundle.fa_uv[i];
        for (std::size_t j = 0; j < c; ++j) {
            af[o++] += bundle.fd_uv[i][j];
        }
        for (std::size_t j = 0; j < r; ++j) {
            af[o++] += bundle.re_uv[i][j];
        }
        for (std::size_t j = 0; j < nw_dim; ++j) {
            af[o++] += nw_values[i][j];
        }
    }
    const double inv = 1.0 / static_cast<double>(bundle.neighbors.size());
    for (double& x : af) {
        x *= inv;
    }
    return af;
}

std::vector<double> multi_hop_aggregate(const Tensor& h, const HopSets& hops, std::uint32_t v,
                                        std::uint32_t t) {
    if (t > hops.max_hop()) {
        throw ConfigError("multi_hop_aggregate: hop sets cover " +
                          std::to_string(hops.max_hop()) + " hops, need " + std::to_string(t));
    }
    std::vector<double> nh;
    if (t < 2) {
        return nh;
    }
    const std::size_t c = h.cols;
    nh.assign(c * (t - 1), 0.0);
    for (std::uint32_t i = 2; i <= t; ++i) {
        const auto members = hops.nodes_at(v, i);
        if (members.empty()) {
            continue;
        }
        double* dst = nh.data() + static_cast<std::size_t>(i - 2) * c;
        for (const std::uint32_t u : members) {
            const auto h_u = h.row(u);
            for (std::size_t j = 0; j < c; ++j) {
                dst[j] += h_u[j];
            }
        }
        const double inv = 1.0 / static_cast<double>(members.size());
        for (std::size_t j = 0; j < c; ++j) {
            dst[j] *= inv;
        }
    }
    return nh;
}

std::vector<double> integrate_features(std::span<const double> h_v, std::span<const double> af,
                                       std::span<const double> nh, const Tensor& w, double leak) {
    std::vector<double> stacked;
    stacked.reserve(h_v.size() + af.size() + nh.size());
    stacked.insert(stacked.end(), h_v.begin(), h_v.end());
    stacked.insert(stacked.end(), af.begin(), af.end());
    stacked.insert(stacked.end(), nh.begin(), nh.end());
    return act_vec_matmul(stacked, w, leak);
}

} // namespace samgc
