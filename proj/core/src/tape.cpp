#include "samgc/tape.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

namespace samgc {

namespace {

std::string shape_str(const Tensor& t) {
    return std::to_string(t.rows) + "x" + std::to_string(t.cols);
}

} // namespace

ValueId Tape::external(Tensor& t) {
    Slot s;
    s.ext = &t;
    slots_.push_back(std::move(s));
    return ValueId{static_cast<std::uint32_t>(slots_.size() - 1)};
}

ValueId Tape::leaf(Tensor t) { return push_owned(std::move(t)); }

ValueId Tape::push_owned(Tensor t) {
    Slot s;
    s.owned = std::move(t);
    slots_.push_back(std::move(s));
    return ValueId{static_cast<std::uint32_t>(slots_.size() - 1)};
}

Tensor& Tape::slot_tensor(ValueId id) {
    Slot& s = slots_.at(id.index);
    return s.ext ? *s.ext : s.owned;
}

const Tensor& Tape::slot_tensor(ValueId id) const {
    const Slot& s = slots_.at(id.index);
    return s.ext ? *s.ext : s.owned;
}

const Tensor& Tape::value(ValueId id) const { return slot_tensor(id); }

std::span<const double> Tape::grad(ValueId id) const {
    const Tensor& t = slot_tensor(id);
    return {t.grad.data(), t.grad.size()};
}

bool Tape::tracks_grad(ValueId id) const {
    return grad_enabled_ && slot_tensor(id).requires_grad;
}

ValueId Tape::alloc(std::size_t rows, std::size_t cols, bool rg) {
    return push_owned(Tensor(rows, cols, rg && grad_enabled_));
}

Tensor& Tape::value_mut(ValueId id) { return slot_tensor(id); }

std::span<double> Tape::grad_mut(ValueId id) {
    Tensor& t = slot_tensor(id);
    return {t.grad.data(), t.grad.size()};
}

void Tape::record(const char* kind, std::function<void(Tape&)> backward_rule) {
    if (grad_enabled_) {
        nodes_.push_back(Node{kind, std::move(backward_rule)});
    }
}

void Tape::backward(ValueId loss) {
    if (backward_done_) {
        throw ContractError("backward already ran on this tape; record a new forward pass first");
    }
    const Tensor& l = slot_tensor(loss);
    if (l.rows != 1 || l.cols != 1) {
        throw ContractError("backward requires a 1x1 loss, got " + shape_str(l));
    }
    if (!grad_enabled_) {
        throw ContractError("backward called on a gradient-disabled tape");
    }
    if (!l.requires_grad) {
        throw ContractError("loss does not depend on any gradient-tracked tensor");
    }
    backward_done_ = true;
    slot_tensor(loss).grad[0] += 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
        it->backward(*this);
    }
}

// --- ops -------------------------------------------------------------------

ValueId Tape::matmul(ValueId a, ValueId b) {
    {
        const Tensor& ta = slot_tensor(a);
        const Tensor& tb = slot_tensor(b);
        if (ta.cols != tb.rows) {
            throw ShapeError("matmul: inner dimensions disagree: " + shape_str(ta) + " vs " +
                             shape_str(tb));
        }
    }
    const bool rg = tracks_grad(a) || tracks_grad(b);
    ValueId out = alloc(slot_tensor(a).rows, slot_tensor(b).cols, rg);
    {
        const Tensor& ta = slot_tensor(a);
        const Tensor& tb = slot_tensor(b);
        Tensor& to = value_mut(out);
        const std::size_t m = ta.rows, k = ta.cols, n = tb.cols;
        // i-k-j order with zero-skip: rows of a are often sparse (binary
        // bag-of-words features, neighbor means of them).
        for (std::size_t i = 0; i < m; ++i) {
            const double* arow = ta.data.data() + i * k;
            double* orow = to.data.data() + i * n;
            for (std::size_t l = 0; l < k; ++l) {
                const double av = arow[l];
                if (av == 0.0) {
                    continue;
                }
                const double* brow = tb.data.data() + l * n;
                for (std::size_t j = 0; j < n; ++j) {
                    orow[j] += av * brow[j];
                }
            }
        }
    }
    if (rg) {
        record("matmul", [a, b, out](Tape& t) {
            const Tensor& ta = t.value(a);
            const Tensor& tb = t.value(b);
            const Tensor& to = t.value(out);
            const std::size_t m = ta.rows, k = ta.cols, n = tb.cols;
            if (t.tracks_grad(a)) {
                // dA = G * B^T
                std::span<double> ga = t.grad_mut(a);
                for (std::size_t i = 0; i < m; ++i) {
                    const double* grow = to.grad.data() + i * n;
                    double* garow = ga.data() + i * k;
                    for (std::size_t l = 0; l < k; ++l) {
                        const double* brow = tb.data.data() + l * n;
                        double acc = 0.0;
                        for (std::size_t j = 0; j < n; ++j) {
                            acc += grow[j] * brow[j];
                        }
                        garow[l] += acc;
                    }
                }
            }
            if (t.tracks_grad(b)) {
                // dB = A^T * G, skipping zero entries of A
                std::span<double> gb = t.grad_mut(b);
                for (std::size_t i = 0; i < m; ++i) {
                    const double* arow = ta.data.data() + i * k;
                    const double* grow = to.grad.data() + i * n;
                    for (std::size_t l = 0; l < k; ++l) {
                        const double av = arow[l];
                        if (av == 0.0) {
                            continue;
                        }
                        double* gbrow = gb.data() + l * n;
                        for (std::size_t j = 0; j < n; ++j) {
                            gbrow[j] += av * grow[j];
                        }
                    }
                }
            }
        });
    }
    return out;
}

ValueId Tape::add(ValueId a, ValueId b) {
    {
        const Tensor& ta = slot_tensor(a);
        const Tensor& tb = slot_tensor(b);
        if (!ta.same_shape(tb)) {
            throw ShapeError("add: shapes disagree: " + shape_str(ta) + " vs " + shape_str(tb));
        }
    }
    const bool rg = tracks_grad(a) || tracks_grad(b);
    ValueId out = alloc(slot_tensor(a).rows, slot_tensor(a).cols, rg);
    {
        const Tensor& ta = slot_tensor(a);
        const Tensor& tb = slot_tensor(b);
        Tensor& to = value_mut(out);
        for (std::size_t i = 0; i < to.data.size(); ++i) {
            to.data[i] = ta.data[i] + tb.data[i];
        }
    }
    if (rg) {
        record("add", [a, b, out](Tape& t) {
            const std::vector<double>& g = t.value(out).grad;
            if (t.tracks_grad(a)) {
                std::span<double> ga = t.grad_mut(a);
                for (std::size_t i = 0; i < g.size(); ++i) {
                    ga[i] += g[i];
                }
            }
            if (t.tracks_grad(b)) {
                std::span<double> gb = t.grad_mut(b);
                for (std::size_t i = 0; i < g.size(); ++i) {
                    gb[i] += g[i];
                }
            }
        });
    }
    return out;
}

ValueId Tape::sub(ValueId a, ValueId b) {
    {
        const Tensor& ta = slot_tensor(a);
        const Tensor& tb = slot_tensor(b);
        if (!ta.same_shape(tb)) {
            throw ShapeError("sub: shapes disagree: " + shape_str(ta) + " vs " + shape_str(tb));
        }
    }
    const bool rg = tracks_grad(a) || tracks_grad(b);
    ValueId out = alloc(slot_tensor(a).rows, slot_tensor(a).cols, rg);
    {
        const Tensor& ta = slot_tensor(a);
        const Tensor& tb = slot_tensor(b);
        Tensor& to = value_mut(out);
        for (std::size_t i = 0; i < to.data.size(); ++i) {
            to.data[i] = ta.data[i] - tb.data[i];
        }
    }
    if (rg) {
        record("sub", [a, b, out](Tape& t) {
            const std::vector<double>& g = t.value(out).grad;
            if (t.tracks_grad(a)) {
                std::span<double> ga = t.grad_mut(a);
                for (std::size_t i = 0; i < g.size(); ++i) {
                    ga[i] += g[i];
                }
            }
            if (t.tracks_grad(b)) {
                std::span<double> gb = t.grad_mut(b);
                for (std::size_t i = 0; i < g.size(); ++i) {
                    gb[i] -= g[i];
                }
            }
        });
    }
    return out;
}

ValueId Tape::concat_cols(std::span<const ValueId> parts) {
    if (parts.empty()) {
        throw ContractError("concat_cols: no parts given");
    }
    const std::size_t rows = slot_tensor(parts[0]).rows;
    std::size_t cols = 0;
    bool rg = false;
    for (const ValueId p : parts) {
        const Tensor& tp = slot_tensor(p);
        if (tp.rows != rows) {
            throw ShapeError("concat_cols: row counts disagree: " + std::to_string(rows) +
                             " vs " + shape_str(tp));
        }
        cols += tp.cols;
        rg = rg || tracks_grad(p);
    }
    ValueId out = alloc(rows, cols, rg);
    {
        Tensor& to = value_mut(out);
        std::size_t col0 = 0;
        for (const ValueId p : parts) {
            const Tensor& tp = slot_tensor(p);
            for (std::size_t i = 0; i < rows; ++i) {
                std::memcpy(to.data.data() + i * cols + col0, tp.data.data() + i * tp.cols,
                            tp.cols * sizeof(double));
            }
            col0 += tp.cols;
        }
    }
    if (rg) {
        std::vector<ValueId> held(parts.begin(), parts.end());
        record("concat_cols", [held = std::move(held), out, rows, cols](Tape& t) {
            const std::vector<double>& g = t.value(out).grad;
            std::size_t col0 = 0;
            for (const ValueId p : held) {
                const std::size_t pc = t.value(p).cols;
                if (t.tracks_grad(p)) {
                    std::span<double> gp = t.grad_mut(p);
                    for (std::size_t i = 0; i < rows; ++i) {
                        const double* src = g.data() + i * cols + col0;
                        double* dst = gp.data() + i * pc;
                        for (std::size_t j = 0; j < pc; ++j) {
                            dst[j] += src[j];
                        }
                    }
                }
                col0 += pc;
            }
        });
    }
    return out;
}

ValueId Tape::slice_rows(ValueId x, std::size_t row_begin, std::size_t row_end) {
    {
        const Tensor& tx = slot_tensor(x);
        if (row_begin >= row_end || row_end > tx.rows) {
            throw ContractError("slice_rows: bad range [" + std::to_string(row_begin) + ", " +
                                std::to_string(row_end) + ") for " + shape_str(tx));
        }
    }
    const bool rg = tracks_grad(x);
    const std::size_t cols = slot_tensor(x).cols;
    ValueId out = alloc(row_end - row_begin, cols, rg);
    {
        const Tensor& tx = slot_tensor(x);
        Tensor& to = value_mut(out);
        std::memcpy(to.data.data(), tx.data.data() + row_begin * cols,
                    to.data.size() * sizeof(double));
    }
    if (rg) {
        record("slice_rows", [x, out, row_begin, cols](Tape& t) {
            if (!t.tracks_grad(x)) {
                return;
            }
            const std::vector<double>& g = t.value(out).grad;
            std::span<double> gx = t.grad_mut(x);
            double* dst = gx.data() + row_begin * cols;
            for (std::size_t i = 0; i < g.size(); ++i) {
                dst[i] += g[i];
            }
        });
    }
    return out;
}

ValueId Tape::gather_rows(ValueId x, std::span<const std::uint32_t> row_ids) {
    {
        const Tensor& tx = slot_tensor(x);
        if (row_ids.empty()) {
            throw ContractError("gather_rows: empty index list");
        }
        for (const std::uint32_t r : row_ids) {
            if (r >= tx.rows) {
                throw ContractError("gather_rows: index " + std::to_string(r) + " out of " +
                                    std::to_string(tx.rows) + " rows");
            }
        }
    }
    const bool rg = tracks_grad(x);
    const std::size_t cols = slot_tensor(x).cols;
    ValueId out = alloc(row_ids.size(), cols, rg);
    {
        const Tensor& tx = slot_tensor(x);
        Tensor& to = value_mut(out);
        for (std::size_t i = 0; i < row_ids.size(); ++i) {
            std::memcpy(to.data.data() + i * cols, tx.data.data() + row_ids[i] * cols,
                        cols * sizeof(double));
        }
    }
    if (rg) {
        std::vector<std::uint32_t> ids(row_ids.begin(), row_ids.end());
        record("gather_rows", [x, out, ids = std::move(ids), cols](Tape& t) {
            const std::vector<double>& g = t.value(out).grad;
            std::span<double> gx = t.grad_mut(x);
            for (std::size_t i = 0; i < ids.size(); ++i) {
                const double* src = g.data() + i * cols;
                double* dst = gx.data() + ids[i] * cols;
                for (std::size_t j = 0; j < cols; ++j) {
                    dst[j] += src[j];
                }
            }
        });
    }
    return out;
}

ValueId Tape::relu(ValueId x, double leak) {
    const bool rg = tracks_grad(x);
    ValueId out = alloc(slot_tensor(x).rows, slot_tensor(x).cols, rg);
    {
        const Tensor& tx = slot_tensor(x);
        Tensor& to = value_mut(out);
        for (std::size_t i = 0; i < to.data.size(); ++i) {
            const double v = tx.data[i];
            to.data[i] = v > 0.0 ? v : leak * v;
        }
    }
    if (rg) {
        record("relu", [x, out, leak](Tape& t) {
            const Tensor& tx = t.value(x);
            const std::vector<double>& g = t.value(out).grad;
            std::span<double> gx = t.grad_mut(x);
            for (std::size_t i = 0; i < g.size(); ++i) {
                gx[i] += tx.data[i] > 0.0 ? g[i] : leak * g[i];
            }
        });
    }
    return out;
}

ValueId Tape::reduce_rows(ValueId x, Reduce mode) {
    const bool rg = tracks_grad(x);
    const std::size_t m = slot_tensor(x).rows;
    const std::size_t n = slot_tensor(x).cols;
    ValueId out = alloc(1, n, rg);
    std::vector<std::uint32_t> argmax;
    {
        const Tensor& tx = slot_tensor(x);
        Tensor& to = value_mut(out);
        if (mode == Reduce::max) {
            argmax.assign(n, 0);
            for (std::size_t j = 0; j < n; ++j) {
                double best = tx.at(0, j);
                std::uint32_t bi = 0;
                for (std::size_t i = 1; i < m; ++i) {
                    if (tx.at(i, j) > best) {
                        best = tx.at(i, j);
                        bi = static_cast<std::uint32_t>(i);
                    }
                }
                to.data[j] = best;
                argmax[j] = bi;
            }
        } else {
            const double inv = 1.0 / static_cast<double>(m);
            for (std::size_t j = 0; j < n; ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    acc += tx.at(i, j);
                }
                to.data[j] = acc * inv;
            }
        }
    }
    if (rg) {
        if (mode == Reduce::max) {
            record("reduce_rows_max", [x, out, argmax = std::move(argmax), n](Tape& t) {
                const std::vector<double>& g = t.value(out).grad;
                std::span<double> gx = t.grad_mut(x);
                const std::size_t cols = n;
                for (std::size_t j = 0; j < cols; ++j) {
                    gx[argmax[j] * cols + j] += g[j];
                }
            });
        } else {
            record("reduce_rows_mean", [x, out, m, n](Tape& t) {
                const std::vector<double>& g = t.value(out).grad;
                std::span<double> gx = t.grad_mut(x);
                const double inv = 1.0 / static_cast<double>(m);
                for (std::size_t i = 0; i < m; ++i) {
                    for (std::size_t j = 0; j < n; ++j) {
                        gx[i * n + j] += g[j] * inv;
                    }
                }
            });
        }
    }
    return out;
}

ValueId Tape::row_softmax(ValueId x) {
    const bool rg = tracks_grad(x);
    const std::size_t m = slot_tensor(x).rows;
    const std::size_t n = slot_tensor(x).cols;
    ValueId out = alloc(m, n, rg);
    {
        const Tensor& tx = slot_tensor(x);
        Tensor& to = value_mut(out);
        for (std::size_t i = 0; i < m; ++i) {
            const double* src = tx.data.data() + i * n;
            double* dst = to.data.data() + i * n;
            double mx = src[0];
            for (std::size_t j = 1; j < n; ++j) {
                mx = std::max(mx, src[j]);
            }
            double sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                dst[j] = std::exp(src[j] - mx);
                sum += dst[j];
            }
            const double inv = 1.0 / sum;
            for (std::size_t j = 0; j < n; ++j) {
                dst[j] *= inv;
            }
        }
    }
    if (rg) {
        record("row_softmax", [x, out, m, n](Tape& t) {
            const Tensor& to = t.value(out);
            std::span<double> gx = t.grad_mut(x);
            for (std::size_t i = 0; i < m; ++i) {
                const double* s = to.data.data() + i * n;
                const double* g = to.grad.data() + i * n;
                double dot = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    dot += s[j] * g[j];
                }
                for (std::size_t j = 0; j < n; ++j) {
                    gx[i * n + j] += s[j] * (g[j] - dot);
                }
            }
        });
    }
    return out;
}

ValueId Tape::col_softmax(ValueId x) {
    {
        const Tensor& tx = slot_tensor(x);
        if (tx.cols != 1) {
            throw ShapeError("col_softmax expects a single-column tensor, got " + shape_str(tx));
        }
    }
    const bool rg = tracks_grad(x);
    const std::size_t m = slot_tensor(x).rows;
    ValueId out = alloc(m, 1, rg);
    {
        const Tensor& tx = slot_tensor(x);
        Tensor& to = value_mut(out);
        double mx = tx.data[0];
        for (std::size_t i = 1; i < m; ++i) {
            mx = std::max(mx, tx.data[i]);
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            to.data[i] = std::exp(tx.data[i] - mx);
            sum += to.data[i];
        }
        const double inv = 1.0 / sum;
        for (std::size_t i = 0; i < m; ++i) {
            to.data[i] *= inv;
        }
    }
    if (rg) {
        record("col_softmax", [x, out, m](Tape& t) {
            const Tensor& to = t.value(out);
            std::span<double> gx = t.grad_mut(x);
            double dot = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                dot += to.data[i] * to.grad[i];
            }
            for (std::size_t i = 0; i < m; ++i) {
                gx[i] += to.data[i] * (to.grad[i] - dot);
            }
        });
    }
    return out;
}

ValueId Tape::row_scale(ValueId x, ValueId scale) {
    {
        const Tensor& tx = slot_tensor(x);
        const Tensor& ts = slot_tensor(scale);
        if (ts.cols != 1 || ts.rows != tx.rows) {
            throw ShapeError("row_scale: scale must be " + std::to_string(tx.rows) +
                             "x1, got " + shape_str(ts));
        }
    }
    const bool rg = tracks_grad(x) || tracks_grad(scale);
    const std::size_t m = slot_tensor(x).rows;
    const std::size_t n = slot_tensor(x).cols;
    ValueId out = alloc(m, n, rg);
    {
        const Tensor& tx = slot_tensor(x);
        const Tensor& ts = slot_tensor(scale);
        Tensor& to = value_mut(out);
        for (std::size_t i = 0; i < m; ++i) {
            const double s = ts.data[i];
            for (std::size_t j = 0; j < n; ++j) {
                to.data[i * n + j] = tx.data[i * n + j] * s;
            }
        }
    }
    if (rg) {
        record("row_scale", [x, scale, out, m, n](Tape& t) {
            const Tensor& tx = t.value(x);
            const Tensor& ts = t.value(scale);
            const std::vector<double>& g = t.value(out).grad;
            if (t.tracks_grad(x)) {
                std::span<double> gx = t.grad_mut(x);
                for (std::size_t i = 0; i < m; ++i) {
                    const double s = ts.data[i];
                    for (std::size_t j = 0; j < n; ++j) {
                        gx[i * n + j] += g[i * n + j] * s;
                    }
                }
            }
            if (t.tracks_grad(scale)) {
                std::span<double> gs = t.grad_mut(scale);
                for (std::size_t i = 0; i < m; ++i) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < n; ++j) {
                        acc += g[i * n + j] * tx.data[i * n + j];
                    }
                    gs[i] += acc;
                }
            }
        });
    }
    return out;
}

ValueId Tape::dropout(ValueId x, double rate, Rng& rng, bool training) {
    if (rate < 0.0 || rate >= 1.0) {
        throw ConfigError("dropout rate must lie in [0, 1), got " + std::to_string(rate));
    }
    if (!training || rate == 0.0) {
        return x;
    }
    const bool rg = tracks_grad(x);
    const std::size_t m = slot_tensor(x).rows;
    const std::size_t n = slot_tensor(x).cols;
    ValueId out = alloc(m, n, rg);
    const double keep = 1.0 - rate;
    const double inv_keep = 1.0 / keep;
    std::vector<float> factor(m * n);
    {
        const Tensor& tx = slot_tensor(x);
        Tensor& to = value_mut(out);
        for (std::size_t i = 0; i < m * n; ++i) {
            const bool kept = rng.uniform() < keep;
            factor[i] = kept ? static_cast<float>(inv_keep) : 0.0f;
            to.data[i] = tx.data[i] * factor[i];
        }
    }
    if (rg) {
        record("dropout", [x, out, factor = std::move(factor)](Tape& t) {
            const std::vector<double>& g = t.value(out).grad;
            std::span<double> gx = t.grad_mut(x);
            for (std::size_t i = 0; i < g.size(); ++i) {
                gx[i] += g[i] * factor[i];
            }
        });
    }
    return out;
}

ValueId Tape::cross_entropy_mean(ValueId logits, std::span<const std::uint32_t> labels,
                                 std::span<const std::uint32_t> mask) {
    const std::size_t m = slot_tensor(logits).rows;
    const std::size_t c = slot_tensor(logits).cols;
    if (labels.size() != m) {
        throw ShapeError("cross_entropy_mean: " + std::to_string(labels.size()) +
                         " labels for " + std::to_string(m) + " rows");
    }
    std::vector<std::uint32_t> rows;
    if (mask.empty()) {
        rows.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            rows[i] = static_cast<std::uint32_t>(i);
        }
    } else {
        rows.assign(mask.begin(), mask.end());
        for (const std::uint32_t r : rows) {
            if (r >= m) {
                throw ContractError("cross_entropy_mean: mask row " + std::to_string(r) +
                                    " out of " + std::to_string(m));
            }
        }
    }
    for (const std::uint32_t r : rows) {
        if (labels[r] >= c) {
            throw DataError("cross_entropy_mean: label " + std::to_string(labels[r]) +
                            " out of range at row " + std::to_string(r));
        }
    }

    const bool rg = tracks_grad(logits);
    ValueId out = alloc(1, 1, rg);
    // Softmax probabilities of the masked rows, cached for the backward rule.
    std::vector<double> probs(rows.size() * c);
    {
        const Tensor& tl = slot_tensor(logits);
        double total = 0.0;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const double* src = tl.data.data() + rows[r] * c;
            double* p = probs.data() + r * c;
            double mx = src[0];
            for (std::size_t j = 1; j < c; ++j) {
                mx = std::max(mx, src[j]);
            }
            double sum = 0.0;
            for (std::size_t j = 0; j < c; ++j) {
                p[j] = std::exp(src[j] - mx);
                sum += p[j];
            }
            const double inv = 1.0 / sum;
            for (std::size_t j = 0; j < c; ++j) {
                p[j] *= inv;
            }
            // -log softmax[label] = log(sum) + mx - logit[label]
            total += std::log(sum) + mx - src[labels[rows[r]]];
        }
        value_mut(out).data[0] = total / static_cast<double>(rows.size());
    }
    if (rg) {
        std::vector<std::uint32_t> masked_labels(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            masked_labels[r] = labels[rows[r]];
        }
        record("cross_entropy_mean",
               [logits, out, rows = std::move(rows), masked_labels = std::move(masked_labels),
                probs = std::move(probs), c](Tape& t) {
                   const double gs = t.value(out).grad[0] / static_cast<double>(rows.size());
                   std::span<double> gl = t.grad_mut(logits);
                   for (std::size_t r = 0; r < rows.size(); ++r) {
                       const double* p = probs.data() + r * c;
                       double* dst = gl.data() + rows[r] * c;
                       for (std::size_t j = 0; j < c; ++j) {
                           dst[j] += gs * (p[j] - (j == masked_labels[r] ? 1.0 : 0.0));
                       }
                   }
               });
    }
    return out;
}

} // namespace samgc
