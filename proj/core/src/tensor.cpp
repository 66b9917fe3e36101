#include "samgc/tensor.hpp"

#include <cmath>
#include <string>

#include "samgc/rng.hpp"

namespace samgc {

namespace {

void check_dims(std::size_t r, std::size_t c) {
    if (r == 0 || c == 0) {
        throw ShapeError("tensor dimensions must be positive, got " + std::to_string(r) + "x" +
                         std::to_string(c));
    }
}

} // namespace

Tensor::Tensor(std::size_t r, std::size_t c, bool rg)
    : rows(r), cols(c), data(r * c, 0.0), requires_grad(rg) {
    check_dims(r, c);
    if (rg) {
        grad.assign(r * c, 0.0);
    }
}

Tensor::Tensor(std::size_t r, std::size_t c, std::vector<double> values, bool rg)
    : rows(r), cols(c), data(std::move(values)), requires_grad(rg) {
    check_dims(r, c);
    if (data.size() != r * c) {
        throw ShapeError("tensor data length " + std::to_string(data.size()) +
                         " does not match shape " + std::to_string(r) + "x" + std::to_string(c));
    }
    if (rg) {
        grad.assign(r * c, 0.0);
    }
}

void Tensor::set_requires_grad(bool rg) {
    requires_grad = rg;
    if (rg) {
        grad.assign(size(), 0.0);
    } else {
        grad.clear();
        grad.shrink_to_fit();
    }
}

void Tensor::zero_grad() {
    if (requires_grad) {
        grad.assign(size(), 0.0);
    }
}

bool Tensor::all_finite() const {
    for (const double v : data) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

Tensor tensor_of(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<double> values;
    values.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) {
            throw ShapeError("tensor_of: ragged rows");
        }
        values.insert(values.end(), row.begin(), row.end());
    }
    return Tensor(r, c, std::move(values));
}

Tensor glorot_init(std::size_t rows, std::size_t cols, std::uint64_t rng_seed) {
    check_dims(rows, cols);
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Rng rng(rng_seed);
    Tensor t(rows, cols);
    for (double& v : t.data) {
        v = rng.uniform(-bound, bound);
    }
    return t;
}

} // namespace samgc
