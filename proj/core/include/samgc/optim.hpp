#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "samgc/tensor.hpp"

namespace samgc {

// A learnable tensor plus its Adam moment estimates.
struct Parameter {
    std::string name;
    Tensor value; // requires_grad is always on
    std::vector<double> adam_m;
    std::vector<double> adam_v;
    std::uint64_t step_count = 0;

    Parameter() = default;
    Parameter(std::string param_name, Tensor initial)
        : name(std::move(param_name)), value(std::move(initial)) {
        value.set_requires_grad(true);
        adam_m.assign(value.size(), 0.0);
        adam_v.assign(value.size(), 0.0);
    }
};

struct AdamConfig {
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
};

// One Adam update with bias correction. Decoupled weight decay is applied
// before the adaptive step; gradients are zeroed afterwards.
void adam_step(std::span<Parameter* const> params, const AdamConfig& cfg);

void adam_step(std::span<Parameter* const> params, double lr, double beta1, double beta2,
               double eps, double weight_decay);

} // namespace samgc
