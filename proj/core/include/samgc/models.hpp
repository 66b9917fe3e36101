#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "samgc/graph.hpp"
#include "samgc/layer.hpp"
#include "samgc/optim.hpp"
#include "samgc/pooling.hpp"
#include "samgc/tape.hpp"

namespace samgc {

struct Metrics {
    double oa = 0.0;
    double macc = 0.0;
    double loss = 0.0;
    std::vector<double> per_class_recall; // NaN for classes absent from the mask
};

// OA plus mean per-class recall over the classes present in `mask`.
Metrics metrics_from_logits(const Tensor& logits, std::span<const std::uint32_t> labels,
                            std::span<const std::uint32_t> mask, double loss);

// --- node classification -----------------------------------------------------

struct NodeClassifierConfig {
    std::uint32_t in_dim = 0;
    std::uint32_t hidden_dim = 64;
    std::uint32_t classes = 0;
    Variant variant = Variant::samgc;
    std::uint32_t hops = 2;
    std::uint32_t re_dim = 16;
    std::uint32_t nw_dim = 16;
    double dropout = 0.5;
    double structural_leak = 0.01;
    double activation_leak = 0.0;
};

// Three stacked convolution layers with dropout between them, then a fully
// connected readout per node.
class NodeClassifier {
public:
    NodeClassifier(const NodeClassifierConfig& cfg, std::uint64_t seed);

    ValueId forward(Tape& tape, Tensor& features, const Graph& g, const HopSets& hops,
                    bool training, Rng& dropout_rng);

    const NodeClassifierConfig& config() const { return cfg_; }
    std::vector<Parameter*> parameters();
    std::vector<std::pair<std::string, Parameter*>> named_parameters();

private:
    NodeClassifierConfig cfg_;
    std::vector<SamgcLayer> layers_;
    Parameter fc_;
};

struct NodeData {
    Tensor* features = nullptr;
    std::span<const std::uint32_t> labels;
    const Graph* graph = nullptr;
    const HopSets* hops = nullptr;
};

// One full-batch pass: forward with dropout, masked loss, backward, Adam.
Metrics train_epoch(NodeClassifier& model, const NodeData& data,
                    std::span<const std::uint32_t> train_mask, const AdamConfig& opt, Rng& rng);

// Gradient-free evaluation over a nonempty mask; parameters are untouched.
Metrics evaluate(NodeClassifier& model, const NodeData& data,
                 std::span<const std::uint32_t> mask);

// Eval-mode logits for the whole graph (shared by val/test metric reads).
Tensor eval_logits(NodeClassifier& model, const NodeData& data);

// --- point-cloud classification -----------------------------------------------

// A group of convolution layers run over several k-NN graphs built from the
// current features; their outputs are stacked column-wise.
struct GsamgcModule {
    std::vector<std::uint32_t> k_list;
    std::vector<SamgcLayer> per_k;

    GsamgcModule(std::span<const std::uint32_t> ks, const SamgcLayerDims& dims,
                 const std::string& name, Rng& init);
    ValueId forward(Tape& tape, ValueId h);
    std::uint32_t out_dim() const;
    void collect_parameters(std::vector<Parameter*>& out);
};

// cat(columnwise max, columnwise mean) over nodes, then a fully connected
// layer to per-phase logits.
ValueId phase_readout(Tape& tape, ValueId features, Parameter& fc);

struct PointCloudConfig {
    std::uint32_t classes = 4;
    std::uint32_t phases = 2;
    std::vector<std::uint32_t> k_list{8, 16};
    std::uint32_t per_k_dim = 16; // per-graph output width within a module
    std::uint32_t hops = 2;
    std::uint32_t re_dim = 8;
    std::uint32_t nw_dim = 8;
    double pool_ratio = 0.5;
    std::uint32_t pool_k = 8;
    double structural_leak = 0.01;
    double activation_leak = 0.0;
};

class PointCloudClassifier {
public:
    PointCloudClassifier(const PointCloudConfig& cfg, std::uint64_t seed);

    // Per-phase logits (each [1 x classes]) for one cloud.
    std::vector<ValueId> forward(Tape& tape, Tensor& cloud);

    const PointCloudConfig& config() const { return cfg_; }
    std::vector<Parameter*> parameters();
    std::vector<std::pair<std::string, Parameter*>> named_parameters();

private:
    struct Phase {
        GsamgcModule module1;
        GsamgcModule module2;
        Parameter fc;
    };
    PointCloudConfig cfg_;
    std::vector<Phase> phases_;
    std::vector<PoolingParams> pools_; // one between consecutive phases
};

// Sum of the per-phase losses (exact) and the argmax of the summed per-phase
// softmax probabilities.
struct CombineResult {
    std::uint32_t predicted_class = 0;
    ValueId loss;
};

CombineResult hierarchical_combine(Tape& tape, std::span<const ValueId> phase_logits,
                                   std::span<const ValueId> phase_losses);

struct CloudData {
    std::vector<Tensor>* clouds = nullptr;
    std::span<const std::uint32_t> labels;
};

Metrics train_epoch_pc(PointCloudClassifier& model, const CloudData& data, const AdamConfig& opt,
                       Rng& rng);

Metrics evaluate_pc(PointCloudClassifier& model, const CloudData& data);

} // namespace samgc
