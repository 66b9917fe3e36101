#pragma once

#include "samgc/index_view.hpp"
#include "samgc/tape.hpp"

namespace samgc {

// Differentiable ops over CSR-style index lists. `lists` groups, per target
// node v, the source rows u the op aggregates over; the "edge" ops emit one
// row per listed (v, u) pair in CSR order (v ascending, u ascending within v).
// Each op copies its index arrays, so the backing graph need not outlive the
// tape. Empty groups produce zero rows (the isolated-node convention).

// out[v, :] = mean over u in lists(v) of x[u, :]. [lists.size() x C]
ValueId segment_mean_rows(Tape& tape, ValueId x, IndexView lists);

// One row per pair: x[u, :] - x[v, :]. Requires at least one pair. [total x C]
ValueId pair_diff_rows(Tape& tape, ValueId x, IndexView lists);

// out[v, :] = mean over the rows of `edge_vals` in v's segment. [n x k]
ValueId edge_mean_by_segment(Tape& tape, ValueId edge_vals, IndexView lists);

// out[v, c] = max over u in lists(v) of act(p[u, c] - p[v, c]) where act is
// (leaky) relu; ties go to the first (lowest-index) maximizer. [n x C]
ValueId pair_diff_act_segmax(Tape& tape, ValueId p, IndexView lists, double leak);

// One row per pair: cosine between (h[u] - h[v]) and base[v], defined as 0
// when either norm falls below 1e-12. [total x 1]
ValueId pair_cosine_vs_base(Tape& tape, ValueId h, ValueId base, IndexView lists);

// One row per pair: |h[u, :] - h[v, :]| * w, computed without materializing
// the absolute differences. [total x D]
ValueId pair_absdiff_matmul(Tape& tape, ValueId h, ValueId w, IndexView lists);

// out[v, :] = mean over u in lists(v) of |h[u, :] - h[v, :]|. [n x C]
ValueId neighbor_absdiff_mean(Tape& tape, ValueId h, IndexView lists);

} // namespace samgc
