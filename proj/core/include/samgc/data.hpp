#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "samgc/graph.hpp"
#include "samgc/models.hpp"
#include "samgc/rng.hpp"
#include "samgc/tensor.hpp"

namespace samgc {

// A citation network: binary bag-of-words features, one class label per
// paper, undirected citation edges.
struct CitationDataset {
    Tensor features; // [n x C]
    std::vector<std::uint32_t> labels;
    Graph graph;
    std::unordered_map<std::string, std::uint32_t> id_map; // external paper id -> node
    std::vector<std::string> class_names;                  // first-appearance order
    std::size_t dropped_citations = 0; // cite lines with an unknown endpoint
};

// Loads the two-file citation format: `content` lines are
// id <tab> f1..fC <tab> label, `cites` lines are cited <tab> citing.
// Node ids follow first appearance in the content file; edges are
// symmetrized and deduplicated; citations touching unknown ids are dropped
// (counted in dropped_citations).
CitationDataset load_cora(const std::string& content_path, const std::string& cites_path);

// Scales every feature row to unit L1 mass (rows of zeros stay zero).
void row_normalize(Tensor& features);

enum class SplitMode { standard, random_stratified };

struct Split {
    std::vector<std::uint32_t> train;
    std::vector<std::uint32_t> val;
    std::vector<std::uint32_t> test;
};

struct SplitSizes {
    std::uint32_t train_per_class = 20;
    std::uint32_t val_size = 500;
    std::uint32_t test_size = 1000;
    double train_frac = 0.05; // random mode, per class
    double val_frac = 0.15;
};

// standard: train_per_class nodes per class, then val_size/test_size from
// the remainder. random_stratified: per-class fractions. Disjoint, each
// class present in train, deterministic per seed, all sets ascending.
Split make_split(const CitationDataset& ds, SplitMode mode, std::uint64_t seed,
                 const SplitSizes& sizes = {});

// --- synthetic point clouds ---------------------------------------------------

enum class ShapeClass : std::uint32_t { sphere = 0, cube = 1, plane = 2, torus = 3 };

inline constexpr std::uint32_t kShapeClassCount = 4;

const char* shape_name(ShapeClass c);

// Points sampled uniformly on the shape surface, before jitter, rotation, or
// normalization. Spheres have radius 1, cubes side 2, planes side 2, tori
// major radius 1 and minor radius 0.35.
Tensor sample_shape(ShapeClass shape, std::size_t n_pts, Rng& rng);

struct SyntheticCloudSet {
    std::vector<Tensor> clouds; // each [n_pts x 3], inside the unit sphere
    std::vector<std::uint32_t> labels;
    std::uint64_t seed = 0;
    std::vector<std::string> class_names;
};

// per_class clouds of every shape class: surface sample, Gaussian jitter,
// random rotation, then centering and unit-sphere normalization.
SyntheticCloudSet gen_synthetic_clouds(std::size_t per_class, std::size_t n_pts,
                                       double noise_sigma, std::uint64_t seed);

// --- metrics export -------------------------------------------------------------

struct MetricsRow {
    std::uint32_t epoch = 0;
    std::string split;
    Metrics metrics;
};

// Header `epoch,split,loss,oa,macc`; one row per entry; floats at 6 decimals.
void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows);

} // namespace samgc
