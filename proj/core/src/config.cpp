#include "samgc/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "samgc/error.hpp"

namespace samgc {

const std::vector<RunConfig::KeyDef>& RunConfig::schema() {
    static const std::vector<KeyDef> defs = {
        {"data_dir", "data/cora", "directory holding cora.content and cora.cites"},
        {"out_dir", "out", "directory for metrics, checkpoints, dumps"},
        {"seed", "1", "master seed for init, splits, dropout, shuffling"},
        {"split_mode", "standard", "standard | random"},
        {"train_per_class", "20", "standard split: training nodes per class"},
        {"val_size", "500", "standard split: validation set size"},
        {"test_size", "1000", "standard split: test set size"},
        {"train_frac", "0.05", "random split: per-class training fraction"},
        {"val_frac", "0.15", "random split: per-class validation fraction"},
        {"row_normalize", "false", "scale feature rows to unit L1 mass"},
        {"variant", "samgc", "graphsage | sagc | nwa_sagc | samgc"},
        {"hops", "2", "neighborhood hops aggregated per convolution"},
        {"hidden_dim", "64", "node classifier hidden width"},
        {"re_dim", "16", "relational embedding width"},
        {"nw_dim", "16", "neighbor-wise mixing width"},
        {"dropout", "0.5", "dropout between node-classifier layers"},
        {"lr", "0.01", "Adam learning rate"},
        {"weight_decay", "0.0005", "decoupled weight decay"},
        {"beta1", "0.9", "Adam first-moment decay"},
        {"beta2", "0.999", "Adam second-moment decay"},
        {"adam_eps", "1e-8", "Adam denominator epsilon"},
        {"epochs", "300", "maximum training epochs"},
        {"patience", "30", "early-stop patience on validation accuracy"},
        {"structural_leak", "0.01", "leaky slope inside the structural MLPs"},
        {"activation_leak", "0.0", "leaky slope elsewhere"},
        {"pc_points", "128", "points per synthetic cloud"},
        {"pc_noise", "0.02", "jitter sigma for synthetic clouds"},
        {"pc_train_per_class", "200", "synthetic training clouds per class"},
        {"pc_test_per_class", "50", "synthetic test clouds per class"},
        {"pc_k_list", "8,16", "k values of the grouped modules"},
        {"pc_phases", "2", "prediction phases"},
        {"pc_per_k_dim", "16", "per-graph output width inside a module"},
        {"pc_re_dim", "8", "relational embedding width (point clouds)"},
        {"pc_nw_dim", "8", "neighbor-wise mixing width (point clouds)"},
        {"pc_pool_ratio", "0.5", "node fraction kept by pooling"},
        {"pc_pool_k", "8", "k for the pooled graph rebuild"},
        {"pc_epochs", "12", "point-cloud training epochs"},
        {"pc_lr", "0.003", "point-cloud Adam learning rate"},
        {"pc_weight_decay", "0.0", "point-cloud weight decay"},
        {"model_in_dim", "0", "checkpoint echo: input feature width"},
        {"model_classes", "0", "checkpoint echo: class count"},
    };
    return defs;
}

RunConfig::RunConfig() {
    for (const KeyDef& def : schema()) {
        values_[def.key] = def.default_value;
    }
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) {
        ++a;
    }
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) {
        --b;
    }
    return s.substr(a, b - a);
}

} // namespace

void RunConfig::load_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw IoError("cannot open config file: " + path);
    }
    std::size_t line_no = 0;
    for (std::string line; std::getline(f, line);) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') {
            continue;
        }
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key=value, got '" + stripped + "'");
        }
        set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
}

void RunConfig::set(const std::string& key, const std::string& value) {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        throw ConfigError("unknown config key '" + key + "'");
    }
    it->second = value;
}

const std::string& RunConfig::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        throw ConfigError("unknown config key '" + key + "'");
    }
    return it->second;
}

std::int64_t RunConfig::get_int(const std::string& key) const {
    const std::string& s = get(key);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ConfigError("config key '" + key + "' is not an integer: '" + s + "'");
    }
    return v;
}

std::uint32_t RunConfig::get_u32(const std::string& key) const {
    const std::int64_t v = get_int(key);
    if (v < 0 || v > 0xffffffffLL) {
        throw ConfigError("config key '" + key + "' out of range");
    }
    return static_cast<std::uint32_t>(v);
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
    const std::int64_t v = get_int(key);
    if (v < 0) {
        throw ConfigError("config key '" + key + "' must be nonnegative");
    }
    return static_cast<std::uint64_t>(v);
}

double RunConfig::get_double(const std::string& key) const {
    const std::string& s = get(key);
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not a number: '" + s + "'");
    }
}

bool RunConfig::get_bool(const std::string& key) const {
    const std::string& s = get(key);
    if (s == "true" || s == "1" || s == "yes") {
        return true;
    }
    if (s == "false" || s == "0" || s == "no") {
        return false;
    }
    throw ConfigError("config key '" + key + "' is not a boolean: '" + s + "'");
}

std::vector<std::uint32_t> RunConfig::get_u32_list(const std::string& key) const {
    const std::string& s = get(key);
    std::vector<std::uint32_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (t.empty()) {
            continue;
        }
        std::uint32_t v = 0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || ptr != t.data() + t.size()) {
            throw ConfigError("config key '" + key + "' has a bad list entry: '" + t + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw ConfigError("config key '" + key + "' lists no values");
    }
    return out;
}

std::string RunConfig::serialize() const {
    std::string out;
    for (const auto& [k, v] : values_) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

void RunConfig::load_echo(const std::string& echo) {
    std::stringstream ss(echo);
    for (std::string line; std::getline(ss, line);) {
        const std::string stripped = trim(line);
        if (stripped.empty()) {
            continue;
        }
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("bad config echo line: '" + stripped + "'");
        }
        set(stripped.substr(0, eq), stripped.substr(eq + 1));
    }
}

} // namespace samgc
