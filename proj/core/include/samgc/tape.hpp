#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "samgc/rng.hpp"
#include "samgc/tensor.hpp"

namespace samgc {

// Handle to a tensor value recorded on a tape.
struct ValueId {
    std::uint32_t index = 0;
};

enum class Reduce { max, mean };

// Reverse-mode tape over dense 2-D tensors. Every op appends its output value
// and, when gradients are live, a backward rule; backward() replays the rules
// once in reverse topological order (which is the recording order reversed).
//
// A tape drives exactly one forward/backward round: calling backward() twice
// without a fresh forward is a contract error. Constructing with
// grad_enabled = false records no rules and allocates no gradient buffers
// (evaluation mode).
class Tape {
public:
    explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}

    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // Leaf bound by reference; gradients accumulate into t.grad when t
    // requires grad. The tensor must outlive the tape.
    ValueId external(Tensor& t);

    // Leaf owned by the tape.
    ValueId leaf(Tensor t);

    const Tensor& value(ValueId id) const;
    std::span<const double> grad(ValueId id) const;
    bool grad_enabled() const { return grad_enabled_; }
    std::size_t node_count() const { return nodes_.size(); }

    // --- operations -------------------------------------------------------

    ValueId matmul(ValueId a, ValueId b);
    ValueId add(ValueId a, ValueId b);
    ValueId sub(ValueId a, ValueId b);
    ValueId concat_cols(std::span<const ValueId> parts);
    ValueId slice_rows(ValueId x, std::size_t row_begin, std::size_t row_end);
    ValueId gather_rows(ValueId x, std::span<const std::uint32_t> row_ids);

    // max(0, x) when leak == 0, otherwise the leaky variant; the subgradient
    // at 0 is 0 for the plain case and leak otherwise.
    ValueId relu(ValueId x, double leak = 0.0);

    // Columnwise reduction to a single row. Max routes its gradient to the
    // first maximal row (lowest index on ties).
    ValueId reduce_rows(ValueId x, Reduce mode);

    // Per-row softmax, max-shifted so large inputs cannot overflow.
    ValueId row_softmax(ValueId x);

    // Softmax across the rows of a single-column tensor.
    ValueId col_softmax(ValueId x);

    // out[i, :] = x[i, :] * scale[i, 0]; scale must be [rows x 1].
    ValueId row_scale(ValueId x, ValueId scale);

    // Inverted dropout; the identity (same id) when not training or rate 0.
    ValueId dropout(ValueId x, double rate, Rng& rng, bool training);

    // Mean over the masked rows of -log softmax(logits)[label]; empty mask
    // means all rows. Log-sum-exp stabilized. Output is 1x1.
    ValueId cross_entropy_mean(ValueId logits, std::span<const std::uint32_t> labels,
                               std::span<const std::uint32_t> mask = {});

    // Seeds d(loss)/d(loss) = 1 and accumulates gradients into every
    // requires-grad tensor reachable from loss. loss must be 1x1.
    void backward(ValueId loss);

    // --- op-author interface (used by the fused graph-aware ops) -----------

    // True when gradients are live and the value participates in them.
    bool tracks_grad(ValueId id) const;

    // Appends an owned output tensor; allocates its grad buffer when rg.
    ValueId alloc(std::size_t rows, std::size_t cols, bool rg);

    Tensor& value_mut(ValueId id);
    std::span<double> grad_mut(ValueId id);

    void record(const char* kind, std::function<void(Tape&)> backward_rule);

private:
    struct Slot {
        Tensor owned;
        Tensor* ext = nullptr;
    };

    struct Node {
        const char* kind;
        std::function<void(Tape&)> backward;
    };

    Tensor& slot_tensor(ValueId id);
    const Tensor& slot_tensor(ValueId id) const;
    ValueId push_owned(Tensor t);

    // deque: references into slots stay valid while new values are appended
    std::deque<Slot> slots_;
    std::vector<Node> nodes_;
    bool grad_enabled_ = true;
    bool backward_done_ = false;
};

} // namespace samgc
