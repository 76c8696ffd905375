#include "plankit/control_file.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "plankit/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "control file I/O assumes a little-endian host");
static_assert(sizeof(float) == 4);

namespace plankit {

namespace {

void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t read_u32(std::istream& in, const std::string& path) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    if (!in) throw IoError("truncated header: " + path);
    return v;
}

void write_values(std::ostream& out, const std::vector<float>& data) {
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(float)));
}

void read_values(std::istream& in, std::vector<float>& data, const std::string& path) {
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(float)));
    if (!in) throw IoError("truncated payload: " + path);
}

void check_magic(std::istream& in, const char expected[4], const std::string& path) {
    char magic[4] = {};
    in.read(magic, 4);
    if (!in || std::memcmp(magic, expected, 4) != 0) {
        throw IoError("bad magic, not a " + std::string(expected, 4) + " file: " + path);
    }
}

std::uint64_t checked_count(std::uint32_t a, std::uint32_t b, std::uint32_t c,
                            const std::string& path) {
    const std::uint64_t n = static_cast<std::uint64_t>(a) * b * c;
    if (n == 0 || n > (1ull << 31)) {
        throw IoError("implausible tensor dimensions in " + path);
    }
    return n;
}

} // namespace

void write_control_file(const ControlTensor& ctrl, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    out.write("WVRC", 4);
    write_u32(out, kControlFormatVersion);
    write_u32(out, static_cast<std::uint32_t>(ctrl.channels));
    write_u32(out, static_cast<std::uint32_t>(ctrl.frames));
    write_values(out, ctrl.data);
    if (!out) throw IoError("write failed: " + path);
}

ControlTensor read_control_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    check_magic(in, "WVRC", path);
    const std::uint32_t version = read_u32(in, path);
    if (version != kControlFormatVersion) {
        throw IoError("unsupported control file version " + std::to_string(version));
    }
    const std::uint32_t channels = read_u32(in, path);
    const std::uint32_t frames = read_u32(in, path);
    ControlTensor ctrl;
    ctrl.channels = static_cast<int>(channels);
    ctrl.frames = static_cast<int>(frames);
    ctrl.data.resize(checked_count(channels, frames, 1, path));
    read_values(in, ctrl.data, path);
    return ctrl;
}

void write_tiled_file(const TiledTensor& tiled, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    out.write("WVRT", 4);
    write_u32(out, kControlFormatVersion);
    write_u32(out, static_cast<std::uint32_t>(tiled.channels));
    write_u32(out, static_cast<std::uint32_t>(tiled.bins));
    write_u32(out, static_cast<std::uint32_t>(tiled.frames));
    write_values(out, tiled.data);
    if (!out) throw IoError("write failed: " + path);
}

TiledTensor read_tiled_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    check_magic(in, "WVRT", path);
    const std::uint32_t version = read_u32(in, path);
    if (version != kControlFormatVersion) {
        throw IoError("unsupported tiled file version " + std::to_string(version));
    }
    const std::uint32_t channels = read_u32(in, path);
    const std::uint32_t bins = read_u32(in, path);
    const std::uint32_t frames = read_u32(in, path);
    TiledTensor tiled;
    tiled.channels = static_cast<int>(channels);
    tiled.bins = static_cast<int>(bins);
    tiled.frames = static_cast<int>(frames);
    tiled.data.resize(checked_count(channels, bins, frames, path));
    read_values(in, tiled.data, path);
    return tiled;
}

} // namespace plankit
