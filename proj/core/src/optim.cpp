#include "samgc/optim.hpp"

#include <cmath>

namespace samgc {

void adam_step(std::span<Parameter* const> params, const AdamConfig& cfg) {
    for (Parameter* p : params) {
        p->step_count += 1;
        const double t = static_cast<double>(p->step_count);
        const double bc1 = 1.0 - std::pow(cfg.beta1, t);
        const double bc2 = 1.0 - std::pow(cfg.beta2, t);
        auto& w = p->value.data;
        const auto& g = p->value.grad;
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (cfg.weight_decay != 0.0) {
                w[i] -= cfg.lr * cfg.weight_decay * w[i];
            }
            p->adam_m[i] = cfg.beta1 * p->adam_m[i] + (1.0 - cfg.beta1) * g[i];
            p->adam_v[i] = cfg.beta2 * p->adam_v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double mhat = p->adam_m[i] / bc1;
            const double vhat = p->adam_v[i] / bc2;
            w[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
        }
        p->value.zero_grad();
    }
}

void adam_step(std::span<Parameter* const> params, double lr, double beta1, double beta2,
               double eps, double weight_decay) {
    adam_step(params, AdamConfig{lr, beta1, beta2, eps, weight_decay});
}

} // namespace samgc
