#include "samgc/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "samgc/error.hpp"

namespace samgc {

Metrics metrics_from_logits(const Tensor& logits, std::span<const std::uint32_t> labels,
                            std::span<const std::uint32_t> mask, double loss) {
    if (mask.empty()) {
        throw ContractError("metrics: empty evaluation mask");
    }
    const std::size_t classes = logits.cols;
    std::vector<std::size_t> correct(classes, 0), total(classes, 0);
    std::size_t hits = 0;
    for (const std::uint32_t r : mask) {
        const auto row = logits.row(r);
        std::size_t arg = 0;
        for (std::size_t j = 1; j < classes; ++j) {
            if (row[j] > row[arg]) {
                arg = j;
            }
        }
        total[labels[r]] += 1;
        if (arg == labels[r]) {
            correct[labels[r]] += 1;
            ++hits;
        }
    }
    Metrics m;
    m.loss = loss;
    m.oa = static_cast<double>(hits) / static_cast<double>(mask.size());
    m.per_class_recall.assign(classes, std::numeric_limits<double>::quiet_NaN());
    double acc = 0.0;
    std::size_t present = 0;
    for (std::size_t c = 0; c < classes; ++c) {
        if (total[c] > 0) {
            m.per_class_recall[c] = static_cast<double>(correct[c]) / static_cast<double>(total[c]);
            acc += m.per_class_recall[c];
            ++present;
        }
    }
    m.macc = present > 0 ? acc / static_cast<double>(present) : 0.0;
    return m;
}

// --- node classification -----------------------------------------------------

NodeClassifier::NodeClassifier(const NodeClassifierConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
    if (cfg.in_dim == 0 || cfg.classes == 0) {
        throw ConfigError("node classifier needs positive input width and class count");
    }
    Rng init(seed);
    layers_.reserve(3);
    for (int i = 0; i < 3; ++i) {
        SamgcLayerDims dims;
        dims.in_dim = i == 0 ? cfg.in_dim : cfg.hidden_dim;
        dims.out_dim = cfg.hidden_dim;
        dims.re_dim = cfg.re_dim;
        dims.nw_dim = cfg.nw_dim;
        dims.hops = cfg.hops;
        dims.structural_leak = cfg.structural_leak;
        dims.activation_leak = cfg.activation_leak;
        layers_.emplace_back(cfg.variant, dims, "layer" + std::to_string(i), init);
    }
    fc_ = Parameter("fc.w", glorot_init(cfg.hidden_dim, cfg.classes, init.next_u64()));
}

ValueId NodeClassifier::forward(Tape& tape, Tensor& features, const Graph& g,
                                const HopSets& hops, bool training, Rng& dropout_rng) {
    if (features.cols != cfg_.in_dim) {
        throw ConfigError("node classifier expects " + std::to_string(cfg_.in_dim) +
                          " feature columns, got " + std::to_string(features.cols));
    }
    ValueId x = tape.external(features);
    for (auto& layer : layers_) {
        x = layer.forward(tape, x, g, hops);
        x = tape.dropout(x, cfg_.dropout, dropout_rng, training);
    }
    return tape.matmul(x, tape.external(fc_.value));
}

std::vector<Parameter*> NodeClassifier::parameters() {
    std::vector<Parameter*> out;
    for (auto& layer : layers_) {
        layer.collect_parameters(out);
    }
    out.push_back(&fc_);
    return out;
}

std::vector<std::pair<std::string, Parameter*>> NodeClassifier::named_parameters() {
    std::vector<std::pair<std::string, Parameter*>> out;
    for (Parameter* p : parameters()) {
        out.emplace_back(p->name, p);
    }
    return out;
}

Metrics train_epoch(NodeClassifier& model, const NodeData& data,
                    std::span<const std::uint32_t> train_mask, const AdamConfig& opt, Rng& rng) {
    if (train_mask.empty()) {
        throw ContractError("train_epoch: empty training mask");
    }
    Tape tape;
    ValueId logits = model.forward(tape, *data.features, *data.graph, *data.hops, true, rng);
    ValueId loss = tape.cross_entropy_mean(logits, data.labels, train_mask);
    const double loss_value = tape.value(loss).data[0];
    tape.backward(loss);
    auto params = model.parameters();
    adam_step(params, opt);
    return metrics_from_logits(tape.value(logits), data.labels, train_mask, loss_value);
}

Tensor eval_logits(NodeClassifier& model, const NodeData& data) {
    Tape tape(false);
    Rng unused(0);
    ValueId logits = model.forward(tape, *data.features, *data.graph, *data.hops, false, unused);
    return tape.value(logits);
}

Metrics evaluate(NodeClassifier& model, const NodeData& data,
                 std::span<const std::uint32_t> mask) {
    if (mask.empty()) {
        throw ContractError("evaluate: empty mask");
    }
    Tape tape(false);
    Rng unused(0);
    ValueId logits = model.forward(tape, *data.features, *data.graph, *data.hops, false, unused);
    ValueId loss = tape.cross_entropy_mean(logits, data.labels, mask);
    return metrics_from_logits(tape.value(logits), data.labels, mask, tape.value(loss).data[0]);
}

// --- point-cloud classification -----------------------------------------------

GsamgcModule::GsamgcModule(std::span<const std::uint32_t> ks, const SamgcLayerDims& dims,
                           const std::string& name, Rng& init)
    : k_list(ks.begin(), ks.end()) {
    if (k_list.empty()) {
        throw ConfigError("grouped module needs at least one k");
    }
    per_k.reserve(k_list.size());
    for (std::size_t i = 0; i < k_list.size(); ++i) {
        per_k.emplace_back(Variant::samgc, dims, name + ".k" + std::to_string(k_list[i]), init);
    }
}

std::uint32_t GsamgcModule::out_dim() const {
    return per_k.front().dims().out_dim * static_cast<std::uint32_t>(per_k.size());
}

ValueId GsamgcModule::forward(Tape& tape, ValueId h) {
    const Tensor& th = tape.value(h);
    std::vector<ValueId> parts;
    parts.reserve(per_k.size());
    for (std::size_t i = 0; i < per_k.size(); ++i) {
        const std::uint32_t k = k_list[i];
        if (th.rows <= k) {
            throw ConfigError("grouped module: k = " + std::to_string(k) + " needs more than " +
                              std::to_string(th.rows) + " nodes");
        }
        // Dynamic edges: the graph is rebuilt from the features this module
        // actually sees.
        const Graph g = build_knn_graph(th, k);
        const HopSets hops = exact_hop_sets(g, per_k[i].dims().hops);
        parts.push_back(per_k[i].forward(tape, h, g, hops));
    }
    return tape.concat_cols(parts);
}

void GsamgcModule::collect_parameters(std::vector<Parameter*>& out) {
    for (auto& layer : per_k) {
        layer.collect_parameters(out);
    }
}

ValueId phase_readout(Tape& tape, ValueId features, Parameter& fc) {
    ValueId mx = tape.reduce_rows(features, Reduce::max);
    ValueId mean = tape.reduce_rows(features, Reduce::mean);
    const ValueId parts[] = {mx, mean};
    ValueId stacked = tape.concat_cols(parts);
    return tape.matmul(stacked, tape.external(fc.value));
}

PointCloudClassifier::PointCloudClassifier(const PointCloudConfig& cfg, std::uint64_t seed)
    : cfg_(cfg) {
    if (cfg.phases < 1) {
        throw ConfigError("point-cloud classifier needs at least one phase");
    }
    Rng init(seed);
    const std::uint32_t module_out =
        cfg.per_k_dim * static_cast<std::uint32_t>(cfg.k_list.size());
    for (std::uint32_t p = 0; p < cfg.phases; ++p) {
        SamgcLayerDims d1;
        d1.in_dim = p == 0 ? 3 : module_out;
        d1.out_dim = cfg.per_k_dim;
        d1.re_dim = cfg.re_dim;
        d1.nw_dim = cfg.nw_dim;
        d1.hops = cfg.hops;
        d1.structural_leak = cfg.structural_leak;
        d1.activation_leak = cfg.activation_leak;
        SamgcLayerDims d2 = d1;
        d2.in_dim = module_out;
        const std::string base = "phase" + std::to_string(p);
        Phase phase{
            GsamgcModule(cfg.k_list, d1, base + ".m1", init),
            GsamgcModule(cfg.k_list, d2, base + ".m2", init),
            Parameter(base + ".fc", glorot_init(2 * module_out, cfg.classes, init.next_u64()))};
        phases_.push_back(std::move(phase));
        if (p + 1 < cfg.phases) {
            SamgcLayerDims pd = d2;
            pd.in_dim = module_out;
            pd.out_dim = module_out;
            pd.hops = 1; // the refinement acts locally
            PoolingParams pool(module_out, module_out, pd, base + ".pool", init);
            pool.ratio = cfg.pool_ratio;
            pool.mode = PoolGraphMode::knn_rebuild;
            pool.rebuild_k = cfg.pool_k;
            pools_.push_back(std::move(pool));
        }
    }
}

std::vector<ValueId> PointCloudClassifier::forward(Tape& tape, Tensor& cloud) {
    if (cloud.cols != 3) {
        throw ConfigError("point clouds must have 3 columns");
    }
    std::vector<ValueId> logits;
    ValueId x = tape.external(cloud);
    for (std::size_t p = 0; p < phases_.size(); ++p) {
        x = phases_[p].module1.forward(tape, x);
        x = phases_[p].module2.forward(tape, x);
        logits.push_back(phase_readout(tape, x, phases_[p].fc));
        if (p < pools_.size()) {
            const Graph g = build_knn_graph(tape.value(x), pools_[p].rebuild_k);
            const HopSets hops = exact_hop_sets(g, 1);
            PoolingOutput pooled = pool(tape, x, g, hops, pools_[p]);
            x = pooled.h_select;
        }
    }
    return logits;
}

std::vector<Parameter*> PointCloudClassifier::parameters() {
    std::vector<Parameter*> out;
    for (auto& phase : phases_) {
        phase.module1.collect_parameters(out);
        phase.module2.collect_parameters(out);
        out.push_back(&phase.fc);
    }
    for (auto& pool : pools_) {
        pool.collect_parameters(out);
    }
    return out;
}

std::vector<std::pair<std::string, Parameter*>> PointCloudClassifier::named_parameters() {
    std::vector<std::pair<std::string, Parameter*>> out;
    for (Parameter* p : parameters()) {
        out.emplace_back(p->name, p);
    }
    return out;
}

CombineResult hierarchical_combine(Tape& tape, std::span<const ValueId> phase_logits,
                                   std::span<const ValueId> phase_losses) {
    if (phase_logits.empty() || phase_logits.size() != phase_losses.size()) {
        throw ContractError("hierarchical_combine: one loss per phase required");
    }
    CombineResult result;
    result.loss = phase_losses[0];
    for (std::size_t p = 1; p < phase_losses.size(); ++p) {
        result.loss = tape.add(result.loss, phase_losses[p]);
    }
    // Prediction = argmax of the summed per-phase class probabilities.
    const std::size_t classes = tape.value(phase_logits[0]).cols;
    std::vector<double> summed(classes, 0.0);
    for (const ValueId id : phase_logits) {
        const Tensor& row = tape.value(id);
        if (row.rows != 1 || row.cols != classes) {
            throw ShapeError("hierarchical_combine: phase logits must share one 1xK shape");
        }
        double mx = row.data[0];
        for (std::size_t j = 1; j < classes; ++j) {
            mx = std::max(mx, row.data[j]);
        }
        double sum = 0.0;
        std::vector<double> e(classes);
        for (std::size_t j = 0; j < classes; ++j) {
            e[j] = std::exp(row.data[j] - mx);
            sum += e[j];
        }
        for (std::size_t j = 0; j < classes; ++j) {
            summed[j] += e[j] / sum;
        }
    }
    result.predicted_class = 0;
    for (std::size_t j = 1; j < classes; ++j) {
        if (summed[j] > summed[result.predicted_class]) {
            result.predicted_class = static_cast<std::uint32_t>(j);
        }
    }
    return result;
}

namespace {

Metrics cloud_metrics(const std::vector<std::uint32_t>& predictions,
                      std::span<const std::uint32_t> labels, std::size_t classes,
                      double mean_loss) {
    // Reuse the logits-based path by encoding predictions as one-hot rows.
    Tensor onehot(predictions.size(), classes);
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        onehot.at(i, predictions[i]) = 1.0;
    }
    std::vector<std::uint32_t> mask(predictions.size());
    std::iota(mask.begin(), mask.end(), 0u);
    return metrics_from_logits(onehot, labels, mask, mean_loss);
}

} // namespace

Metrics train_epoch_pc(PointCloudClassifier& model, const CloudData& data, const AdamConfig& opt,
                       Rng& rng) {
    const std::size_t count = data.clouds->size();
    if (count == 0) {
        throw ContractError("train_epoch_pc: no clouds");
    }
    std::vector<std::uint32_t> order(count);
    std::iota(order.begin(), order.end(), 0u);
    rng.shuffle(order);

    std::vector<std::uint32_t> predictions(count, 0);
    double loss_acc = 0.0;
    auto params = model.parameters();
    for (const std::uint32_t idx : order) {
        Tape tape;
        std::vector<ValueId> logits = model.forward(tape, (*data.clouds)[idx]);
        const std::uint32_t label[] = {data.labels[idx]};
        std::vector<ValueId> losses;
        losses.reserve(logits.size());
        for (const ValueId l : logits) {
            losses.push_back(tape.cross_entropy_mean(l, label));
        }
        CombineResult combined = hierarchical_combine(tape, logits, losses);
        loss_acc += tape.value(combined.loss).data[0];
        predictions[idx] = combined.predicted_class;
        tape.backward(combined.loss);
        adam_step(params, opt);
    }
    return cloud_metrics(predictions, data.labels, model.config().classes,
                         loss_acc / static_cast<double>(count));
}

Metrics evaluate_pc(PointCloudClassifier& model, const CloudData& data) {
    const std::size_t count = data.clouds->size();
    if (count == 0) {
        throw ContractError("evaluate_pc: no clouds");
    }
    std::vector<std::uint32_t> predictions(count, 0);
    double loss_acc = 0.0;
    for (std::size_t idx = 0; idx < count; ++idx) {
        Tape tape(false);
        std::vector<ValueId> logits = model.forward(tape, (*data.clouds)[idx]);
        const std::uint32_t label[] = {data.labels[idx]};
        std::vector<ValueId> losses;
        losses.reserve(logits.size());
        for (const ValueId l : logits) {
            losses.push_back(tape.cross_entropy_mean(l, label));
        }
        CombineResult combined = hierarchical_combine(tape, logits, losses);
        predictions[idx] = combined.predicted_class;
        loss_acc += tape.value(combined.loss).data[0];
    }
    return cloud_metrics(predictions, data.labels, model.config().classes,
                         loss_acc / static_cast<double>(count));
}

} // namespace samgc
