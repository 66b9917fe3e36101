#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "samgc/error.hpp"

namespace samgc {

// Dense row-major 2-D matrix of 64-bit floats, the sole numeric carrier.
// grad is allocated (same shape as data) iff requires_grad. Zero-sized
// dimensions are rejected; empty aggregations are handled by the callers
// that own the empty sets.
struct Tensor {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;
    bool requires_grad = false;
    std::vector<double> grad;

    Tensor() = default;
    Tensor(std::size_t r, std::size_t c, bool rg = false);
    Tensor(std::size_t r, std::size_t c, std::vector<double> values, bool rg = false);

    std::size_t size() const { return rows * cols; }

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    // Toggles gradient tracking; allocates or releases the grad buffer.
    void set_requires_grad(bool rg);
    void zero_grad();

    bool all_finite() const;
    bool same_shape(const Tensor& other) const { return rows == other.rows && cols == other.cols; }
};

// Convenience constructor for literals in tests and fixtures.
Tensor tensor_of(std::initializer_list<std::initializer_list<double>> rows);

// Uniform init in +-sqrt(6 / (rows + cols)); bitwise deterministic per seed.
Tensor glorot_init(std::size_t rows, std::size_t cols, std::uint64_t rng_seed);

} // namespace samgc
