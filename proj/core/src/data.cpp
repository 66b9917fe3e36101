#include "samgc/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "samgc/error.hpp"

namespace samgc {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find('\t', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') {
        s.pop_back();
    }
    return s;
}

} // namespace

CitationDataset load_cora(const std::string& content_path, const std::string& cites_path) {
    std::ifstream content(content_path);
    if (!content) {
        throw IoError("cannot open content file: " + content_path);
    }

    struct Row {
        std::string id;
        std::vector<double> features;
        std::string label;
    };
    std::vector<Row> rows;
    std::size_t line_no = 0;
    std::size_t feature_dim = 0;
    for (std::string raw; std::getline(content, raw);) {
        ++line_no;
        const std::string line = strip_cr(raw);
        if (line.empty()) {
            continue;
        }
        const auto fields = split_tabs(line);
        if (fields.size() < 3) {
            throw DataError("content line " + std::to_string(line_no) +
                            ": expected id, features, label");
        }
        Row row;
        row.id = fields.front();
        row.label = fields.back();
        const std::size_t dim = fields.size() - 2;
        if (feature_dim == 0) {
            feature_dim = dim;
        } else if (dim != feature_dim) {
            throw DataError("content line " + std::to_string(line_no) + ": " +
                            std::to_string(dim) + " feature fields, expected " +
                            std::to_string(feature_dim));
        }
        row.features.reserve(dim);
        for (std::size_t i = 1; i + 1 < fields.size(); ++i) {
            if (fields[i] == "0") {
                row.features.push_back(0.0);
            } else if (fields[i] == "1") {
                row.features.push_back(1.0);
            } else {
                throw DataError("content line " + std::to_string(line_no) +
                                ": feature field '" + fields[i] + "' is not binary");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw DataError("content file is empty: " + content_path);
    }

    CitationDataset ds;
    ds.features = Tensor(rows.size(), feature_dim);
    ds.labels.resize(rows.size());
    std::unordered_map<std::string, std::uint32_t> label_ids;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto [it, inserted] = ds.id_map.emplace(rows[i].id, static_cast<std::uint32_t>(i));
        if (!inserted) {
            throw DataError("duplicate paper id '" + rows[i].id + "' in content file");
        }
        std::copy(rows[i].features.begin(), rows[i].features.end(),
                  ds.features.data.begin() + i * feature_dim);
        const auto [lit, fresh] =
            label_ids.emplace(rows[i].label, static_cast<std::uint32_t>(ds.class_names.size()));
        if (fresh) {
            ds.class_names.push_back(rows[i].label);
        }
        ds.labels[i] = lit->second;
    }

    std::ifstream cites(cites_path);
    if (!cites) {
        throw IoError("cannot open cites file: " + cites_path);
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    line_no = 0;
    for (std::string raw; std::getline(cites, raw);) {
        ++line_no;
        const std::string line = strip_cr(raw);
        if (line.empty()) {
            continue;
        }
        const auto fields = split_tabs(line);
        if (fields.size() != 2) {
            throw DataError("cites line " + std::to_string(line_no) +
                            ": expected cited <tab> citing");
        }
        const auto a = ds.id_map.find(fields[0]);
        const auto b = ds.id_map.find(fields[1]);
        if (a == ds.id_map.end() || b == ds.id_map.end()) {
            ++ds.dropped_citations;
            continue;
        }
        edges.emplace_back(a->second, b->second);
    }
    ds.graph = Graph::from_edges(static_cast<std::uint32_t>(rows.size()), edges);
    return ds;
}

void row_normalize(Tensor& features) {
    for (std::size_t i = 0; i < features.rows; ++i) {
        auto row = features.row(i);
        double mass = 0.0;
        for (const double v : row) {
            mass += std::fabs(v);
        }
        if (mass > 0.0) {
            const double inv = 1.0 / mass;
            for (double& v : row) {
                v *= inv;
            }
        }
    }
}

Split make_split(const CitationDataset& ds, SplitMode mode, std::uint64_t seed,
                 const SplitSizes& sizes) {
    const std::size_t classes = ds.class_names.size();
    std::vector<std::vector<std::uint32_t>> by_class(classes);
    for (std::uint32_t v = 0; v < ds.labels.size(); ++v) {
        by_class[ds.labels[v]].push_back(v);
    }

    Rng rng(seed);
    Split split;
    std::vector<std::uint32_t> rest;
    if (mode == SplitMode::standard) {
        for (std::size_t c = 0; c < classes; ++c) {
            auto members = by_class[c];
            if (members.size() < sizes.train_per_class) {
                throw DataError("class '" + ds.class_names[c] + "' has " +
                                std::to_string(members.size()) + " nodes, need " +
                                std::to_string(sizes.train_per_class) + " for training");
            }
            rng.shuffle(members);
            split.train.insert(split.train.end(), members.begin(),
                               members.begin() + sizes.train_per_class);
            rest.insert(rest.end(), members.begin() + sizes.train_per_class, members.end());
        }
        if (rest.size() < sizes.val_size + sizes.test_size) {
            throw DataError("not enough nodes left for validation and test sets");
        }
        rng.shuffle(rest);
        split.val.assign(rest.begin(), rest.begin() + sizes.val_size);
        split.test.assign(rest.begin() + sizes.val_size,
                          rest.begin() + sizes.val_size + sizes.test_size);
    } else {
        for (std::size_t c = 0; c < classes; ++c) {
            auto members = by_class[c];
            if (members.empty()) {
                continue;
            }
            rng.shuffle(members);
            const auto n = members.size();
            const std::size_t n_train = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::llround(sizes.train_frac * n)));
            const std::size_t n_val = std::min(
                n - n_train,
                static_cast<std::size_t>(std::llround(sizes.val_frac * n)));
            split.train.insert(split.train.end(), members.begin(), members.begin() + n_train);
            split.val.insert(split.val.end(), members.begin() + n_train,
                             members.begin() + n_train + n_val);
            split.test.insert(split.test.end(), members.begin() + n_train + n_val, members.end());
        }
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.val.begin(), split.val.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

// --- synthetic point clouds ---------------------------------------------------

const char* shape_name(ShapeClass c) {
    switch (c) {
    case ShapeClass::sphere:
        return "sphere";
    case ShapeClass::cube:
        return "cube";
    case ShapeClass::plane:
        return "plane";
    case ShapeClass::torus:
        return "torus";
    }
    return "?";
}

Tensor sample_shape(ShapeClass shape, std::size_t n_pts, Rng& rng) {
    Tensor cloud(n_pts, 3);
    switch (shape) {
    case ShapeClass::sphere:
        for (std::size_t i = 0; i < n_pts; ++i) {
            double x = rng.normal(), y = rng.normal(), z = rng.normal();
            double norm = std::sqrt(x * x + y * y + z * z);
            while (norm < 1e-9) {
                x = rng.normal();
                y = rng.normal();
                z = rng.normal();
                norm = std::sqrt(x * x + y * y + z * z);
            }
            cloud.at(i, 0) = x / norm;
            cloud.at(i, 1) = y / norm;
            cloud.at(i, 2) = z / norm;
        }
        break;
    case ShapeClass::cube:
        for (std::size_t i = 0; i < n_pts; ++i) {
            const std::uint64_t face = rng.below(6);
            const double a = rng.uniform(-1.0, 1.0);
            const double b = rng.uniform(-1.0, 1.0);
            const double s = (face % 2 == 0) ? -1.0 : 1.0;
            switch (face / 2) {
            case 0:
                cloud.at(i, 0) = s;
                cloud.at(i, 1) = a;
                cloud.at(i, 2) = b;
                break;
            case 1:
                cloud.at(i, 0) = a;
                cloud.at(i, 1) = s;
                cloud.at(i, 2) = b;
                break;
            default:
                cloud.at(i, 0) = a;
                cloud.at(i, 1) = b;
                cloud.at(i, 2) = s;
                break;
            }
        }
        break;
    case ShapeClass::plane:
        for (std::size_t i = 0; i < n_pts; ++i) {
            cloud.at(i, 0) = rng.uniform(-1.0, 1.0);
            cloud.at(i, 1) = rng.uniform(-1.0, 1.0);
            cloud.at(i, 2) = 0.0;
        }
        break;
    case ShapeClass::torus: {
        // Area-weighted rejection in the tube angle keeps the surface
        // density uniform.
        const double major = 1.0, minor = 0.35;
        const double ratio = minor / major;
        for (std::size_t i = 0; i < n_pts; ++i) {
            double theta = 0.0;
            while (true) {
                theta = rng.uniform(0.0, 6.283185307179586);
                const double accept = (1.0 + ratio * std::cos(theta)) / (1.0 + ratio);
                if (rng.uniform() < accept) {
                    break;
                }
            }
            const double phi = rng.uniform(0.0, 6.283185307179586);
            const double ring = major + minor * std::cos(theta);
            cloud.at(i, 0) = ring * std::cos(phi);
            cloud.at(i, 1) = ring * std::sin(phi);
            cloud.at(i, 2) = minor * std::sin(theta);
        }
        break;
    }
    }
    return cloud;
}

namespace {

// Uniform rotation from a random unit quaternion.
void random_rotation(Rng& rng, double r[3][3]) {
    double q[4];
    double norm = 0.0;
    do {
        norm = 0.0;
        for (double& c : q) {
            c = rng.normal();
            norm += c * c;
        }
        norm = std::sqrt(norm);
    } while (norm < 1e-9);
    for (double& c : q) {
        c /= norm;
    }
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    r[0][0] = 1 - 2 * (y * y + z * z);
    r[0][1] = 2 * (x * y - w * z);
    r[0][2] = 2 * (x * z + w * y);
    r[1][0] = 2 * (x * y + w * z);
    r[1][1] = 1 - 2 * (x * x + z * z);
    r[1][2] = 2 * (y * z - w * x);
    r[2][0] = 2 * (x * z - w * y);
    r[2][1] = 2 * (y * z + w * x);
    r[2][2] = 1 - 2 * (x * x + y * y);
}

} // namespace

SyntheticCloudSet gen_synthetic_clouds(std::size_t per_class, std::size_t n_pts,
                                       double noise_sigma, std::uint64_t seed) {
    if (n_pts < 16) {
        throw ConfigError("synthetic clouds need at least 16 points, got " +
                          std::to_string(n_pts));
    }
    SyntheticCloudSet set;
    set.seed = seed;
    for (std::uint32_t c = 0; c < kShapeClassCount; ++c) {
        set.class_names.emplace_back(shape_name(static_cast<ShapeClass>(c)));
    }
    Rng rng(seed);
    for (std::uint32_t c = 0; c < kShapeClassCount; ++c) {
        for (std::size_t i = 0; i < per_class; ++i) {
            Tensor cloud = sample_shape(static_cast<ShapeClass>(c), n_pts, rng);
            if (noise_sigma > 0.0) {
                for (double& v : cloud.data) {
                    v += noise_sigma * rng.normal();
                }
            }
            double rot[3][3];
            random_rotation(rng, rot);
            for (std::size_t p = 0; p < n_pts; ++p) {
                const double x = cloud.at(p, 0), y = cloud.at(p, 1), z = cloud.at(p, 2);
                cloud.at(p, 0) = rot[0][0] * x + rot[0][1] * y + rot[0][2] * z;
                cloud.at(p, 1) = rot[1][0] * x + rot[1][1] * y + rot[1][2] * z;
                cloud.at(p, 2) = rot[2][0] * x + rot[2][1] * y + rot[2][2] * z;
            }
            // Center, then scale the farthest point onto the unit sphere.
            double cx = 0.0, cy = 0.0, cz = 0.0;
            for (std::size_t p = 0; p < n_pts; ++p) {
                cx += cloud.at(p, 0);
                cy += cloud.at(p, 1);
                cz += cloud.at(p, 2);
            }
            cx /= static_cast<double>(n_pts);
            cy /= static_cast<double>(n_pts);
            cz /= static_cast<double>(n_pts);
            double max_norm = 0.0;
            for (std::size_t p = 0; p < n_pts; ++p) {
                cloud.at(p, 0) -= cx;
                cloud.at(p, 1) -= cy;
                cloud.at(p, 2) -= cz;
                const double norm = std::sqrt(cloud.at(p, 0) * cloud.at(p, 0) +
                                              cloud.at(p, 1) * cloud.at(p, 1) +
                                              cloud.at(p, 2) * cloud.at(p, 2));
                max_norm = std::max(max_norm, norm);
            }
            if (max_norm > 0.0) {
                const double inv = 1.0 / max_norm;
                for (double& v : cloud.data) {
                    v *= inv;
                }
            }
            set.clouds.push_back(std::move(cloud));
            set.labels.push_back(c);
        }
    }
    return set;
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) {
        throw IoError("cannot open metrics file for writing: " + path);
    }
    std::fputs("epoch,split,loss,oa,macc\n", f);
    for (const auto& row : rows) {
        std::fprintf(f, "%u,%s,%.6f,%.6f,%.6f\n", row.epoch, row.split.c_str(),
                     row.metrics.loss, row.metrics.oa, row.metrics.macc);
    }
    if (std::fclose(f) != 0) {
        throw IoError("failed to finish writing metrics file: " + path);
    }
}

} // namespace samgc
