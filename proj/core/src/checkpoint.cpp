#include "samgc/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "samgc/error.hpp"

namespace samgc {

namespace {

constexpr char kMagic[8] = {'S', 'A', 'M', 'G', 'C', 'K', 'P', 'T'};

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}

void put_f64(std::string& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    put_u64(out, bits);
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;

    void need(std::size_t n, const char* what) {
        if (pos + n > buf.size()) {
            throw IoError(std::string("checkpoint truncated while reading ") + what);
        }
    }

    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
        }
        pos += 4;
        return v;
    }

    std::uint64_t u64(const char* what) {
        need(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
        }
        pos += 8;
        return v;
    }

    double f64(const char* what) {
        const std::uint64_t bits = u64(what);
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }

    std::string bytes(std::size_t n, const char* what) {
        need(n, what);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
};

} // namespace

void save_checkpoint_file(const CheckpointData& data, const std::string& path) {
    std::string out;
    out.append(kMagic, sizeof(kMagic));
    put_u32(out, kCheckpointVersion);
    put_u32(out, static_cast<std::uint32_t>(data.config_echo.size()));
    out.append(data.config_echo);
    put_u32(out, static_cast<std::uint32_t>(data.tensors.size()));
    std::uint64_t offset = 0;
    for (const auto& [name, tensor] : data.tensors) {
        put_u32(out, static_cast<std::uint32_t>(name.size()));
        out.append(name);
        put_u64(out, tensor.rows);
        put_u64(out, tensor.cols);
        put_u64(out, offset);
        offset += tensor.size();
    }
    put_u64(out, offset);
    for (const auto& [name, tensor] : data.tensors) {
        for (const double v : tensor.data) {
            put_f64(out, v);
        }
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("cannot open checkpoint for writing: " + path);
    }
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) {
        throw IoError("failed to write checkpoint: " + path);
    }
}

CheckpointData load_checkpoint_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot open checkpoint: " + path);
    }
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    Reader r{buf};

    const std::string magic = r.bytes(sizeof(kMagic), "magic");
    if (std::memcmp(magic.data(), kMagic, sizeof(kMagic)) != 0) {
        throw IoError("checkpoint header is corrupt (bad magic): " + path);
    }
    const std::uint32_t version = r.u32("version");
    if (version != kCheckpointVersion) {
        throw IoError("checkpoint version " + std::to_string(version) + " is not supported");
    }
    CheckpointData data;
    const std::uint32_t cfg_len = r.u32("config length");
    data.config_echo = r.bytes(cfg_len, "config echo");

    const std::uint32_t count = r.u32("tensor count");
    struct Entry {
        std::string name;
        std::uint64_t rows, cols, offset;
    };
    std::vector<Entry> entries;
    entries.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        Entry e;
        const std::uint32_t name_len = r.u32("tensor name length");
        e.name = r.bytes(name_len, "tensor name");
        e.rows = r.u64("tensor rows");
        e.cols = r.u64("tensor cols");
        e.offset = r.u64("tensor offset");
        entries.push_back(std::move(e));
    }
    const std::uint64_t payload = r.u64("payload size");
    r.need(payload * 8, "payload");
    const std::size_t payload_pos = r.pos;
    for (const Entry& e : entries) {
        if (e.offset + e.rows * e.cols > payload) {
            throw IoError("checkpoint tensor table is corrupt (offsets out of range)");
        }
        Reader tr{buf};
        tr.pos = payload_pos + e.offset * 8;
        Tensor t(e.rows, e.cols);
        for (double& v : t.data) {
            v = tr.f64("payload value");
        }
        data.tensors.emplace_back(e.name, std::move(t));
    }
    return data;
}

} // namespace samgc
