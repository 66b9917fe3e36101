#include "samgc/graph_ops.hpp"

#include <cmath>
#include <memory>
#include <string>
#include <vector>

namespace samgc {

namespace {

constexpr double kNormFloor = 1e-12;

// Owned copy of an IndexView so backward rules outlive the caller's graph.
struct OwnedLists {
    std::vector<std::uint32_t> offsets;
    std::vector<std::uint32_t> items;

    explicit OwnedLists(IndexView v)
        : offsets(v.offsets.begin(), v.offsets.end()), items(v.items.begin(), v.items.end()) {}

    IndexView view() const { return IndexView{offsets, items}; }
};

void check_source(const Tensor& x, IndexView lists, const char* op) {
    for (const std::uint32_t u : lists.items) {
        if (u >= x.rows) {
            throw ContractError(std::string(op) + ": index " + std::to_string(u) + " out of " +
                                std::to_string(x.rows) + " rows");
        }
    }
}

} // namespace

ValueId segment_mean_rows(Tape& tape, ValueId x, IndexView lists) {
    check_source(tape.value(x), lists, "segment_mean_rows");
    const std::size_t cols = tape.value(x).cols;
    const std::size_t n = lists.size();
    const bool rg = tape.tracks_grad(x);
    ValueId out = tape.alloc(n, cols, rg);
    {
        const Tensor& tx = tape.value(x);
        Tensor& to = tape.value_mut(out);
        for (std::size_t v = 0; v < n; ++v) {
            const auto members = lists.at(v);
            if (members.empty()) {
                continue;
            }
            double* dst = to.data.data() + v * cols;
            for (const std::uint32_t u : members) {
                const double* src = tx.data.data() + u * cols;
                for (std::size_t j = 0; j < cols; ++j) {
                    dst[j] += src[j];
                }
            }
            const double inv = 1.0 / static_cast<double>(members.size());
            for (std::size_t j = 0; j < cols; ++j) {
                dst[j] *= inv;
            }
        }
    }
    if (rg) {
        auto owned = std::make_shared<OwnedLists>(lists);
        tape.record("segment_mean_rows", [x, out, owned, n, cols](Tape& t) {
            const std::vector<double>& g = t.value(out).grad;
            std::span<double> gx = t.grad_mut(x);
            const IndexView lv = owned->view();
            for (std::size_t v = 0; v < n; ++v) {
                const auto members = lv.at(v);
                if (members.empty()) {
                    continue;
                }
                const double inv = 1.0 / static_cast<double>(members.size());
                const double* src = g.data() + v * cols;
                for (const std::uint32_t u : members) {
                    double* dst = gx.data() + u * cols;
                    for (std::size_t j = 0; j < cols; ++j) {
                        dst[j] += src[j] * inv;
                    }
                }
            }
        });
    }
    return out;
}

ValueId pair_diff_rows(Tape& tape, ValueId x, IndexView lists) {
    check_source(tape.value(x), lists, "pair_diff_rows");
    if (lists.total() == 0) {
        throw ContractError("pair_diff_rows: no pairs listed");
    }
    const std::size_t cols = tape.value(x).cols;
    const std::size_t n = lists.size();
    const bool rg = tape.tracks_grad(x);
    ValueId out = tape.alloc(lists.total(), cols, rg);
    {
        const Tensor& tx = tape.value(x);
        Tensor& to = tape.value_mut(out);
        std::size_t e = 0;
        for (std::size_t v = 0; v < n; ++v) {
            const double* vrow = tx.data.data() + v * cols;
            for (const std::uint32_t u : lists.at(v)) {
                const double* urow = tx.data.data() + u * cols;
                double* dst = to.data.data() + e * cols;
                for (std::size_t j = 0; j < cols; ++j) {
                    dst[j] = urow[j] - vrow[j];
                }
                ++e;
            }
        }
    }
    if (rg) {
        auto owned = std::make_shared<OwnedLists>(lists);
        tape.record("pair_diff_rows", [x, out, owned, n, cols](Tape& t) {
            const std::vector<double>& g = t.value(out).grad;
            std::span<double> gx = t.grad_mut(x);
            const IndexView lv = owned->view();
            std::size_t e = 0;
            for (std::size_t v = 0; v < n; ++v) {
                double* gv = gx.data() + v * cols;
                for (const std::uint32_t u : lv.at(v)) {
                    const double* src = g.data() + e * cols;
                    double* gu = gx.data() + u * cols;
                    for (std::size_t j = 0; j < cols; ++j) {
                        gu[j] += src[j];
                        gv[j] -= src[j];
                    }
                    ++e;
                }
            }
        });
    }
    return out;
}

ValueId edge_mean_by_segment(Tape& tape, ValueId edge_vals, IndexView lists) {
    const std::size_t cols = tape.value(edge_vals).cols;
    const std::size_t n = lists.size();
    if (tape.value(edge_vals).rows != lists.total()) {
        throw ShapeError("edge_mean_by_segment: " + std::to_string(tape.value(edge_vals).rows) +
                         " rows for " + std::to_string(lists.total()) + " listed pairs");
    }
    const bool rg = tape.tracks_grad(edge_vals);
    ValueId out = tape.alloc(n, cols, rg);
    std::vector<std::uint32_t> offsets(lists.offsets.begin(), lists.offsets.end());
    {
        const Tensor& te = tape.value(edge_vals);
        Tensor& to = tape.value_mut(out);
        for (std::size_t v = 0; v < n; ++v) {
            const std::size_t lo = offsets[v], hi = offsets[v + 1];
            if (lo == hi) {
                continue;
            }
            double* dst = to.data.data() + v * cols;
            for (std::size_t e = lo; e < hi; ++e) {
                const double* src = te.data.data() + e * cols;
                for (std::size_t j = 0; j < cols; ++j) {
                    dst[j] += src[j];
                }
            }
            const double inv = 1.0 / static_cast<double>(hi - lo);
            for (std::size_t j = 0; j < cols; ++j) {
                dst[j] *= inv;
            }
        }
    }
    if (rg) {
        tape.record("edge_mean_by_segment",
                    [edge_vals, out, offsets = std::move(offsets), n, cols](Tape& t) {
                        const std::vector<double>& g = t.value(out).grad;
                        std::span<double> ge = t.grad_mut(edge_vals);
                        for (std::size_t v = 0; v < n; ++v) {
                            const std::size_t lo = offsets[v], hi = offsets[v + 1];
                            if (lo == hi) {
                                continue;
                            }
                            const double inv = 1.0 / static_cast<double>(hi - lo);
                            const double* src = g.data() + v * cols;
                            for (std::size_t e = lo; e < hi; ++e) {
                                double* dst = ge.data() + e * cols;
                                for (std::size_t j = 0; j < cols; ++j) {
                                    dst[j] += src[j] * inv;
                                }
                            }
                        }
                    });
    }
    return out;
}

ValueId pair_diff_act_segmax(Tape& tape, ValueId p, IndexView lists, double leak) {
    check_source(tape.value(p), lists, "pair_diff_act_segmax");
    const std::size_t cols = tape.value(p).cols;
    const std::size_t n = lists.size();
    const bool rg = tape.tracks_grad(p);
    ValueId out = tape.alloc(n, cols, rg);
    constexpr std::uint32_t kNone = 0xffffffffu;
    std::vector<std::uint32_t> winner(rg ? n * cols : 0, kNone);
    {
        const Tensor& tp = tape.value(p);
        Tensor& to = tape.value_mut(out);
        std::vector<double> best(cols);
        for (std::size_t v = 0; v < n; ++v) {
            const auto members = lists.at(v);
            if (members.empty()) {
                continue; // zero row
            }
            const double* vrow = tp.data.data() + v * cols;
            bool first = true;
            for (const std::uint32_t u : members) {
                const double* urow = tp.data.data() + u * cols;
                for (std::size_t j = 0; j < cols; ++j) {
                    const double d = urow[j] - vrow[j];
                    const double a = d > 0.0 ? d : leak * d;
                    if (first || a > best[j]) {
                        best[j] = a;
                        if (rg) {
                            winner[v * cols + j] = u;
                        }
                    }
                }
                first = false;
            }
            double* dst = to.data.data() + v * cols;
            for (std::size_t j = 0; j < cols; ++j) {
                dst[j] = best[j];
            }
        }
    }
    if (rg) {
        tape.record("pair_diff_act_segmax",
                    [p, out, winner = std::move(winner), n, cols, leak](Tape& t) {
                        const Tensor& tp = t.value(p);
                        const std::vector<double>& g = t.value(out).grad;
                        std::span<double> gp = t.grad_mut(p);
                        for (std::size_t v = 0; v < n; ++v) {
                            for (std::size_t j = 0; j < cols; ++j) {
                                const std::uint32_t u = winner[v * cols + j];
                                if (u == kNone) {
                                    continue;
                                }
                                const double d = tp.data[u * cols + j] - tp.data[v * cols + j];
                                const double df = d > 0.0 ? 1.0 : leak;
                                const double gv = g[v * cols + j] * df;
                                gp[u * cols + j] += gv;
                                gp[v * cols + j] -= gv;
                            }
                        }
                    });
    }
    return out;
}

ValueId pair_cosine_vs_base(Tape& tape, ValueId h, ValueId base, IndexView lists) {
    check_source(tape.value(h), lists, "pair_cosine_vs_base");
    if (lists.total() == 0) {
        throw ContractError("pair_cosine_vs_base: no pairs listed");
    }
    {
        const Tensor& th = tape.value(h);
        const Tensor& tb = tape.value(base);
        if (tb.rows != lists.size() || tb.cols != th.cols) {
            throw ShapeError("pair_cosine_vs_base: base must be " + std::to_string(lists.size()) +
                             "x" + std::to_string(th.cols));
        }
    }
    const std::size_t cols = tape.value(h).cols;
    const std::size_t n = lists.size();
    const bool rg = tape.tracks_grad(h) || tape.tracks_grad(base);
    ValueId out = tape.alloc(lists.total(), 1, rg);
    // Cached per pair: dot, |diff|, |base| (zeros mark the degenerate case).
    std::vector<double> cache(rg ? lists.total() * 3 : 0, 0.0);
    {
        const Tensor& th = tape.value(h);
        const Tensor& tb = tape.value(base);
        Tensor& to = tape.value_mut(out);
        std::size_t e = 0;
        for (std::size_t v = 0; v < n; ++v) {
            const double* vrow = th.data.data() + v * cols;
            const double* brow = tb.data.data() + v * cols;
            double nb2 = 0.0;
            for (std::size_t j = 0; j < cols; ++j) {
                nb2 += brow[j] * brow[j];
            }
            const double nb = std::sqrt(nb2);
            for (const std::uint32_t u : lists.at(v)) {
                const double* urow = th.data.data() + u * cols;
                double dot = 0.0, ng2 = 0.0;
                for (std::size_t j = 0; j < cols; ++j) {
                    const double d = urow[j] - vrow[j];
                    dot += d * brow[j];
                    ng2 += d * d;
                }
                const double ng = std::sqrt(ng2);
                double cosv = 0.0;
                if (ng >= kNormFloor && nb >= kNormFloor) {
                    cosv = dot / (ng * nb);
                    if (rg) {
                        cache[e * 3] = dot;
                        cache[e * 3 + 1] = ng;
                        cache[e * 3 + 2] = nb;
                    }
                }
                to.data[e] = cosv;
                ++e;
            }
        }
    }
    if (rg) {
        auto owned = std::make_shared<OwnedLists>(lists);
        tape.record("pair_cosine_vs_base",
                    [h, base, out, owned, cache = std::move(cache), n, cols](Tape& t) {
                        const Tensor& th = t.value(h);
                        const Tensor& tb = t.value(base);
                        const std::vector<double>& g = t.value(out).grad;
                        const bool wh = t.tracks_grad(h);
                        const bool wb = t.tracks_grad(base);
                        const IndexView lv = owned->view();
                        std::size_t e = 0;
                        for (std::size_t v = 0; v < n; ++v) {
                            const double* vrow = th.data.data() + v * cols;
                            const double* brow = tb.data.data() + v * cols;
                            for (const std::uint32_t u : lv.at(v)) {
                                const double ng = cache[e * 3 + 1];
                                const double nb = cache[e * 3 + 2];
                                const double ge = g[e];
                                if (ge == 0.0 || ng == 0.0 || nb == 0.0) {
                                    ++e;
                                    continue;
                                }
                                const double dot = cache[e * 3];
                                const double inv_gb = 1.0 / (ng * nb);
                                const double cosv = dot * inv_gb;
                                const double* urow = th.data.data() + u * cols;
                                if (wh) {
                                    // d cos / d diff = base/(|g||b|) - cos * diff/|g|^2
                                    std::span<double> gh = t.grad_mut(h);
                                    double* gu = gh.data() + u * cols;
                                    double* gv = gh.data() + v * cols;
                                    const double s = cosv / (ng * ng);
                                    for (std::size_t j = 0; j < cols; ++j) {
                                        const double d = urow[j] - vrow[j];
                                        const double dd = ge * (brow[j] * inv_gb - s * d);
                                        gu[j] += dd;
                                        gv[j] -= dd;
                                    }
                                }
                                if (wb) {
                                    std::span<double> gbv = t.grad_mut(base);
                                    double* gb = gbv.data() + v * cols;
                                    const double s = cosv / (nb * nb);
                                    for (std::size_t j = 0; j < cols; ++j) {
                                        const double d = urow[j] - vrow[j];
                                        gb[j] += ge * (d * inv_gb - s * brow[j]);
                                    }
                                }
                                ++e;
                            }
                        }
                    });
    }
    return out;
}

ValueId pair_absdiff_matmul(Tape& tape, ValueId h, ValueId w, IndexView lists) {
    check_source(tape.value(h), lists, "pair_absdiff_matmul");
    if (lists.total() == 0) {
        throw ContractError("pair_absdiff_matmul: no pairs listed");
    }
    {
        const Tensor& th = tape.value(h);
        const Tensor& tw = tape.value(w);
        if (tw.rows != th.cols) {
            throw ShapeError("pair_absdiff_matmul: weight rows " + std::to_string(tw.rows) +
                             " do not match feature width " + std::to_string(th.cols));
        }
    }
    const std::size_t cols = tape.value(h).cols;
    const std::size_t d_out = tape.value(w).cols;
    const std::size_t n = lists.size();
    const bool rg = tape.tracks_grad(h) || tape.tracks_grad(w);
    ValueId out = tape.alloc(lists.total(), d_out, rg);
    {
        const Tensor& th = tape.value(h);
        const Tensor& tw = tape.value(w);
        Tensor& to = tape.value_mut(out);
        std::size_t e = 0;
        for (std::size_t v = 0; v < n; ++v) {
            const double* vrow = th.data.data() + v * cols;
            for (const std::uint32_t u : lists.at(v)) {
                const double* urow = th.data.data() + u * cols;
                double* dst = to.data.data() + e * d_out;
                for (std::size_t c = 0; c < cols; ++c) {
                    const double diff = std::fabs(urow[c] - vrow[c]);
                    if (diff == 0.0) {
                        continue;
                    }
                    const double* wrow = tw.data.data() + c * d_out;
                    for (std::size_t j = 0; j < d_out; ++j) {
                        dst[j] += diff * wrow[j];
                    }
                }
                ++e;
            }
        }
    }
    if (rg) {
        auto owned = std::make_shared<OwnedLists>(lists);
        tape.record("pair_absdiff_matmul",
                    [h, w, out, owned, n, cols, d_out](Tape& t) {
                        const Tensor& th = t.value(h);
                        const Tensor& tw = t.value(w);
                        const std::vector<double>& g = t.value(out).grad;
                        const bool wh = t.tracks_grad(h);
                        const bool ww = t.tracks_grad(w);
                        const IndexView lv = owned->view();
                        std::size_t e = 0;
                        for (std::size_t v = 0; v < n; ++v) {
                            const double* vrow = th.data.data() + v * cols;
                            for (const std::uint32_t u : lv.at(v)) {
                                const double* urow = th.data.data() + u * cols;
                                const double* ge = g.data() + e * d_out;
                                for (std::size_t c = 0; c < cols; ++c) {
                                    const double raw = urow[c] - vrow[c];
                                    if (raw == 0.0) {
                                        continue;
                                    }
                                    const double ad = std::fabs(raw);
                                    if (ww) {
                                        double* gw = t.grad_mut(w).data() + c * d_out;
                                        for (std::size_t j = 0; j < d_out; ++j) {
                                            gw[j] += ad * ge[j];
                                        }
                                    }
                                    if (wh) {
                                        const double* wrow = tw.data.data() + c * d_out;
                                        double acc = 0.0;
                                        for (std::size_t j = 0; j < d_out; ++j) {
                                            acc += wrow[j] * ge[j];
                                        }
                                        const double s = raw > 0.0 ? acc : -acc;
                                        std::span<double> gh = t.grad_mut(h);
                                        gh[u * cols + c] += s;
                                        gh[v * cols + c] -= s;
                                    }
                                }
                                ++e;
                            }
                        }
                    });
    }
    return out;
}

ValueId neighbor_absdiff_mean(Tape& tape, ValueId h, IndexView lists) {
    check_source(tape.value(h), lists, "neighbor_absdiff_mean");
    const std::size_t cols = tape.value(h).cols;
    const std::size_t n = lists.size();
    const bool rg = tape.tracks_grad(h);
    ValueId out = tape.alloc(n, cols, rg);
    {
        const Tensor& th = tape.value(h);
        Tensor& to = tape.value_mut(out);
        for (std::size_t v = 0; v < n; ++v) {
            const auto members = lists.at(v);
            if (members.empty()) {
                continue;
            }
            const double* vrow = th.data.data() + v * cols;
            double* dst = to.data.data() + v * cols;
            for (const std::uint32_t u : members) {
                const double* urow = th.data.data() + u * cols;
                for (std::size_t j = 0; j < cols; ++j) {
                    dst[j] += std::fabs(urow[j] - vrow[j]);
                }
            }
            const double inv = 1.0 / static_cast<double>(members.size());
            for (std::size_t j = 0; j < cols; ++j) {
                dst[j] *= inv;
            }
        }
    }
    if (rg) {
        auto owned = std::make_shared<OwnedLists>(lists);
        tape.record("neighbor_absdiff_mean", [h, out, owned, n, cols](Tape& t) {
            const Tensor& th = t.value(h);
            const std::vector<double>& g = t.value(out).grad;
            std::span<double> gh = t.grad_mut(h);
            const IndexView lv = owned->view();
            for (std::size_t v = 0; v < n; ++v) {
                const auto members = lv.at(v);
                if (members.empty()) {
                    continue;
                }
                const double inv = 1.0 / static_cast<double>(members.size());
                const double* src = g.data() + v * cols;
                const double* vrow = th.data.data() + v * cols;
                double* gv = gh.data() + v * cols;
                for (const std::uint32_t u : members) {
                    const double* urow = th.data.data() + u * cols;
                    double* gu = gh.data() + u * cols;
                    for (std::size_t j = 0; j < cols; ++j) {
                        const double raw = urow[j] - vrow[j];
                        if (raw == 0.0) {
                            continue;
                        }
                        const double s = (raw > 0.0 ? src[j] : -src[j]) * inv;
                        gu[j] += s;
                        gv[j] -= s;
                    }
                }
            }
        });
    }
    return out;
}

} // namespace samgc
