#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace samgc {

// Flat key=value run configuration. Every key has a documented default and
// unknown keys are rejected; a config file supplies overrides and
// command-line flags override the file.
class RunConfig {
public:
    struct KeyDef {
        const char* key;
        const char* default_value;
        const char* help;
    };

    static const std::vector<KeyDef>& schema();

    RunConfig(); // all defaults

    void load_file(const std::string& path);
    void set(const std::string& key, const std::string& value); // unknown key -> ConfigError

    const std::string& get(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    std::uint32_t get_u32(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    double get_double(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<std::uint32_t> get_u32_list(const std::string& key) const;

    // key=value lines for every key, sorted, for echoes and checkpoints.
    std::string serialize() const;
    void load_echo(const std::string& echo); // parses serialize() output

private:
    std::map<std::string, std::string> values_;
};

} // namespace samgc
