#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace samgc {

// CSR-style borrowed view over index lists: entity v in [0, size()) owns the
// slice items[offsets[v] .. offsets[v+1]). Used for adjacency, hop sets, and
// any other per-node index grouping.
struct IndexView {
    std::span<const std::uint32_t> offsets; // size() + 1 entries
    std::span<const std::uint32_t> items;

    std::size_t size() const { return offsets.empty() ? 0 : offsets.size() - 1; }
    std::size_t total() const { return items.size(); }

    std::span<const std::uint32_t> at(std::size_t v) const {
        return items.subspan(offsets[v], offsets[v + 1] - offsets[v]);
    }

    std::size_t count(std::size_t v) const { return offsets[v + 1] - offsets[v]; }
};

} // namespace samgc
